#include "dpfindiff/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dpfindiff/errors.hpp"

namespace dpfd {

namespace {

constexpr const char* kMagic = "dpfindiff-checkpoint v1";

void append_f64_le(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
}

double read_f64_le(const char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
    }
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void emit_config(std::ostringstream& os, const RunConfig& c) {
    os << "cfg data train = " << c.train_path << '\n';
    if (!c.test_path.empty()) os << "cfg data test = " << c.test_path << '\n';
    auto join = [](const std::vector<std::string>& items) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ",";
            s += items[i];
        }
        return s;
    };
    if (!c.numeric_columns.empty()) {
        os << "cfg data numeric = " << join(c.numeric_columns) << '\n';
    }
    if (!c.categorical_columns.empty()) {
        os << "cfg data categorical = " << join(c.categorical_columns) << '\n';
    }
    if (c.label_column) os << "cfg data label = " << *c.label_column << '\n';
    if (c.subsample_rows) os << "cfg data subsample = " << c.subsample_rows << '\n';
    os << "cfg model hidden = " << c.hidden << '\n';
    os << "cfg model d_e = " << c.d_e << '\n';
    os << "cfg model time_dim = " << c.time_dim << '\n';
    os << "cfg model timesteps = " << c.timesteps << '\n';
    os << "cfg model beta_start = " << format_double(c.beta_start) << '\n';
    os << "cfg model beta_end = " << format_double(c.beta_end) << '\n';
    os << "cfg training epochs = " << c.epochs << '\n';
    os << "cfg training batch = " << c.batch_size << '\n';
    os << "cfg training learning_rate = " << format_double(c.learning_rate) << '\n';
    os << "cfg training loss = " << c.loss << '\n';
    os << "cfg training sampler = " << c.sampler << '\n';
    os << "cfg training alpha_start = " << format_double(c.alpha_start) << '\n';
    os << "cfg training alpha_end = " << format_double(c.alpha_end) << '\n';
    os << "cfg training is_correction = " << (c.is_correction ? "true" : "false") << '\n';
    os << "cfg privacy enabled = " << (c.dp_enabled ? "true" : "false") << '\n';
    if (c.epsilon_target) {
        os << "cfg privacy epsilon = " << format_double(*c.epsilon_target) << '\n';
    }
    if (c.sigma) os << "cfg privacy sigma = " << format_double(*c.sigma) << '\n';
    os << "cfg privacy delta = " << format_double(c.delta) << '\n';
    os << "cfg privacy clip = " << format_double(c.clip_norm) << '\n';
    os << "cfg run seed = " << c.seed << '\n';
    os << "cfg run out_dir = " << c.out_dir << '\n';
}

} // namespace

std::string serialize_checkpoint(const TrainerState& state) {
    std::ostringstream os;
    os << kMagic << '\n';
    emit_config(os, state.config);
    os << "epochs_completed = " << state.epochs_completed << '\n';
    os << "budget_stopped = " << (state.budget_stopped ? 1 : 0) << '\n';
    os << "rng = " << state.rng.serialize() << '\n';
    os << "adam_step = " << state.adam.step << '\n';
    if (state.ledger) {
        os << "ledger_sigma = " << format_double(state.ledger->sigma()) << '\n';
        os << "ledger_q = " << format_double(state.ledger->sampling_rate()) << '\n';
        os << "ledger_delta = " << format_double(state.ledger->delta()) << '\n';
        os << "ledger_max_steps = " << state.ledger->max_steps() << '\n';
        os << "ledger_steps = " << state.ledger->steps_taken() << '\n';
    }
    os << "begin schema\n" << format_schema(state.model.schema) << "end schema\n";

    const auto params = state.model.gather_params();
    os << "sections = params:" << params.size() << ",adam_m:" << state.adam.m.size()
       << ",adam_v:" << state.adam.v.size()
       << ",scaler_mean:" << state.model.scaler.mean.size()
       << ",scaler_std:" << state.model.scaler.std.size() << '\n';
    os << "BINARY\n";

    std::string out = os.str();
    for (double v : params) append_f64_le(out, v);
    for (double v : state.adam.m) append_f64_le(out, v);
    for (double v : state.adam.v) append_f64_le(out, v);
    for (double v : state.model.scaler.mean) append_f64_le(out, v);
    for (double v : state.model.scaler.std) append_f64_le(out, v);
    return out;
}

TrainerState deserialize_checkpoint(const std::string& bytes) {
    std::istringstream is(bytes);
    std::string line;
    if (!std::getline(is, line) || line != kMagic) {
        throw DataError("checkpoint: unrecognized format/version header");
    }

    TrainerState state;
    std::string schema_text;
    std::vector<std::pair<std::string, std::size_t>> sections;
    double ledger_sigma = 0.0, ledger_q = 0.0, ledger_delta = 0.0;
    std::size_t ledger_max_steps = 0, ledger_steps = 0;
    bool has_ledger = false;

    while (std::getline(is, line)) {
        if (line == "BINARY") break;
        if (line == "begin schema") {
            while (std::getline(is, line) && line != "end schema") {
                schema_text += line;
                schema_text += '\n';
            }
            continue;
        }
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) {
            throw DataError("checkpoint: malformed line '" + line + "'");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 3);
        if (key.rfind("cfg ", 0) == 0) {
            std::istringstream ks(key.substr(4));
            std::string section, name;
            ks >> section >> name;
            set_config_value(state.config, section, name, value);
        } else if (key == "epochs_completed") {
            state.epochs_completed = std::stoul(value);
        } else if (key == "budget_stopped") {
            state.budget_stopped = value == "1";
        } else if (key == "rng") {
            state.rng.deserialize(value);
        } else if (key == "adam_step") {
            state.adam.step = std::stoul(value);
        } else if (key == "ledger_sigma") {
            ledger_sigma = std::stod(value);
            has_ledger = true;
        } else if (key == "ledger_q") {
            ledger_q = std::stod(value);
        } else if (key == "ledger_delta") {
            ledger_delta = std::stod(value);
        } else if (key == "ledger_max_steps") {
            ledger_max_steps = std::stoul(value);
        } else if (key == "ledger_steps") {
            ledger_steps = std::stoul(value);
        } else if (key == "sections") {
            for (const auto& part : split_list(value)) {
                const auto colon = part.find(':');
                sections.emplace_back(part.substr(0, colon),
                                      std::stoul(part.substr(colon + 1)));
            }
        } else {
            throw DataError("checkpoint: unknown key '" + key + "'");
        }
    }

    // Rebuild model shells before scattering the parameter blob.
    state.model.schema = parse_schema(schema_text);
    state.model.emb = init_embeddings(state.model.schema, state.config.d_e, 0);
    DenoiserConfig net_cfg;
    net_cfg.input_dim = encoded_dim(state.model.schema, state.config.d_e);
    net_cfg.hidden = state.config.hidden;
    net_cfg.time_dim = state.config.time_dim;
    net_cfg.n_classes = state.model.schema.num_classes();
    state.model.net = init_denoiser(net_cfg, 0);
    state.model.schedule = make_schedule(state.config.timesteps, state.config.beta_start,
                                         state.config.beta_end);
    state.model.build_layout();

    const bool adaptive = state.config.sampler == "at";
    state.at = make_at_sampler(adaptive ? state.config.alpha_start : 0.0,
                               adaptive ? state.config.alpha_end : 0.0,
                               state.config.epochs, state.config.timesteps);
    advance_to_epoch(state.at, std::min(state.epochs_completed, state.config.epochs));

    if (has_ledger) {
        state.ledger.emplace(ledger_sigma, ledger_q, ledger_delta, ledger_max_steps);
        state.ledger->restore_steps(ledger_steps);
    }

    // Binary payload.
    const auto marker = bytes.find("\nBINARY\n");
    if (marker == std::string::npos) {
        throw DataError("checkpoint: missing binary payload");
    }
    const char* p = bytes.data() + marker + 8;
    const char* end = bytes.data() + bytes.size();
    auto take = [&](std::size_t count) {
        if (p + count * 8 > end) {
            throw DataError("checkpoint: truncated binary payload");
        }
        std::vector<double> vals(count);
        for (std::size_t i = 0; i < count; ++i) {
            vals[i] = read_f64_le(p);
            p += 8;
        }
        return vals;
    };

    for (const auto& [name, count] : sections) {
        auto vals = take(count);
        if (name == "params") {
            state.model.scatter_params(vals);
        } else if (name == "adam_m") {
            state.adam.m = std::move(vals);
        } else if (name == "adam_v") {
            state.adam.v = std::move(vals);
        } else if (name == "scaler_mean") {
            state.model.scaler.mean = std::move(vals);
        } else if (name == "scaler_std") {
            state.model.scaler.std = std::move(vals);
        } else {
            throw DataError("checkpoint: unknown section '" + name + "'");
        }
    }
    state.adam.lr = state.config.learning_rate;
    return state;
}

void save_checkpoint(const std::string& path, const TrainerState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("checkpoint: cannot write '" + path + "'");
    const std::string bytes = serialize_checkpoint(state);
    out.write(bytes.data(), static_cast<long>(bytes.size()));
}

TrainerState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_checkpoint(buf.str());
}

} // namespace dpfd
