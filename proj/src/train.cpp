#include "dpfindiff/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "dpfindiff/errors.hpp"

namespace dpfd {

namespace {

std::size_t steps_per_epoch(std::size_t n_rows, std::size_t batch) {
    return (n_rows + batch - 1) / batch;
}

CsvTable subsample_table(const CsvTable& table, std::size_t keep) {
    if (keep == 0 || keep >= table.rows.size()) return table;
    CsvTable out;
    out.header = table.header;
    out.rows.assign(table.rows.begin(), table.rows.begin() + static_cast<long>(keep));
    return out;
}

} // namespace

TrainerState init_trainer(const RunConfig& cfg, const CsvTable& raw_table) {
    cfg.validate();
    const CsvTable table = subsample_table(raw_table, cfg.subsample_rows);
    if (table.rows.empty()) {
        throw DataError("train: no rows after subsampling");
    }

    SchemaDeclaration decl;
    decl.numeric = cfg.numeric_columns;
    decl.label = cfg.label_column;
    if (!cfg.categorical_columns.empty()) {
        decl.categorical = cfg.categorical_columns;
    } else {
        for (const auto& name : table.header) {
            if (std::find(cfg.numeric_columns.begin(), cfg.numeric_columns.end(), name) ==
                cfg.numeric_columns.end()) {
                decl.categorical.push_back(name);
            }
        }
    }
    if (decl.label &&
        std::find(decl.categorical.begin(), decl.categorical.end(), *decl.label) ==
            decl.categorical.end()) {
        decl.categorical.push_back(*decl.label);
    }

    TrainerState state;
    state.config = cfg;
    state.config.train_path = cfg.train_path;
    state.model.schema = fit_schema(table, decl);

    Dataset raw = parse_dataset(table, state.model.schema);
    state.model.scaler = fit_scaler(raw, state.model.schema);

    state.rng = Rng(cfg.seed);
    const std::uint64_t emb_seed = state.rng.next_u64();
    const std::uint64_t net_seed = state.rng.next_u64();

    state.model.emb = init_embeddings(state.model.schema, cfg.d_e, emb_seed);
    DenoiserConfig net_cfg;
    net_cfg.input_dim = encoded_dim(state.model.schema, cfg.d_e);
    net_cfg.hidden = cfg.hidden;
    net_cfg.time_dim = cfg.time_dim;
    net_cfg.n_classes = state.model.schema.num_classes();
    state.model.net = init_denoiser(net_cfg, net_seed);
    state.model.schedule = make_schedule(cfg.timesteps, cfg.beta_start, cfg.beta_end);
    state.model.build_layout();

    state.adam = make_adam(state.model.layout.total, cfg.learning_rate);

    const bool adaptive = cfg.sampler == "at";
    state.at = make_at_sampler(adaptive ? cfg.alpha_start : 0.0,
                               adaptive ? cfg.alpha_end : 0.0, cfg.epochs,
                               cfg.timesteps);

    if (cfg.dp_enabled) {
        const std::size_t n = table.rows.size();
        const std::size_t batch = std::min(cfg.batch_size, n);
        const double q = static_cast<double>(batch) / static_cast<double>(n);
        const std::size_t max_steps = cfg.epochs * steps_per_epoch(n, batch);
        double sigma;
        if (cfg.sigma) {
            sigma = *cfg.sigma;
        } else {
            sigma = rdp::calibrate_sigma(*cfg.epsilon_target, cfg.delta, q, max_steps);
        }
        state.ledger.emplace(sigma, q, cfg.delta, max_steps);
    }
    return state;
}

Dataset prepare_training_data(const TrainerState& state, const CsvTable& raw_table) {
    const CsvTable table = subsample_table(raw_table, state.config.subsample_rows);
    Dataset data = parse_dataset(table, state.model.schema);
    apply_scaler(data, state.model.scaler);
    return data;
}

TrainResult train(TrainerState& state, const Dataset& data,
                  std::size_t target_epochs, exec::Mode mode,
                  std::ostream* log_stream) {
    TrainResult result;
    const RunConfig& cfg = state.config;
    const std::size_t n = data.n_rows;
    if (n == 0) throw DataError("train: empty dataset");

    const bool dp = cfg.dp_enabled;
    const std::size_t batch_size = std::min(cfg.batch_size, n);
    const std::size_t steps = steps_per_epoch(n, batch_size);
    const LossKind kind = state.loss_kind();
    const double clip =
        dp ? cfg.clip_norm : std::numeric_limits<double>::infinity();
    const bool conditional = state.model.schema.label.has_value();

    DpConfig dp_cfg;
    if (dp) {
        dp_cfg.clip_norm = cfg.clip_norm;
        dp_cfg.noise_multiplier = state.ledger->sigma();
        dp_cfg.sampling_rate = state.ledger->sampling_rate();
        dp_cfg.delta = cfg.delta;
        dp_cfg.batch_size = batch_size;
        dp_cfg.max_steps = state.ledger->max_steps();
    }

    const std::size_t d = state.model.net.cfg.input_dim;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = state.epochs_completed; epoch < target_epochs; ++epoch) {
        advance_to_epoch(state.at, epoch);

        if (!dp) {
            // Fisher-Yates off the master stream.
            for (std::size_t i = n - 1; i > 0; --i) {
                const std::size_t j = state.rng.next_index(i + 1);
                std::swap(order[i], order[j]);
            }
        }

        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        std::vector<double> epoch_norms;
        bool stopped = false;

        for (std::size_t step = 0; step < steps && !stopped; ++step) {
            std::vector<std::size_t> rows;
            if (dp) {
                // Poisson sampling at rate q; expected size = batch_size.
                const double q = dp_cfg.sampling_rate;
                for (std::size_t r = 0; r < n; ++r) {
                    if (state.rng.next_double() < q) rows.push_back(r);
                }
            } else {
                const std::size_t lo = step * batch_size;
                const std::size_t hi = std::min(lo + batch_size, n);
                rows.assign(order.begin() + static_cast<long>(lo),
                            order.begin() + static_cast<long>(hi));
            }

            std::vector<TrainingSample> batch(rows.size());
            const auto ts = sample_timesteps(state.at, rows.size(), state.rng);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                TrainingSample& s = batch[i];
                s.row = rows[i];
                s.t = ts[i];
                if (conditional) s.label = data.labels[rows[i]];
                s.eps.resize(d);
                for (double& e : s.eps) e = state.rng.next_gaussian();
                if (cfg.is_correction) {
                    s.weight = 1.0 / (static_cast<double>(state.at.T) *
                                      state.at.probability(s.t));
                }
            }

            ClippedBatch acc{{}, {}, {}};
            if (!batch.empty()) {
                acc = accumulate_clipped_grads(state.model, data, batch, kind, clip,
                                               mode);
                for (double l : acc.losses) loss_sum += l;
                loss_count += acc.losses.size();
                epoch_norms.insert(epoch_norms.end(), acc.pre_clip_norms.begin(),
                                   acc.pre_clip_norms.end());
            }

            if (dp) {
                if (acc.sum.empty()) acc.sum.assign(state.model.layout.total, 0.0);
                try {
                    dp_step_presummed(state.model, acc.sum, dp_cfg, state.rng,
                                      state.adam, *state.ledger);
                } catch (const BudgetError&) {
                    stopped = true;
                    result.budget_stopped = true;
                    state.budget_stopped = true;
                }
            } else if (!batch.empty()) {
                const double inv = 1.0 / static_cast<double>(batch.size());
                for (double& x : acc.sum) x *= inv;
                adam_update(state.model, state.adam, acc.sum);
            }
        }

        EpochLog log;
        log.epoch = epoch + 1;
        log.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        log.epsilon = state.ledger ? state.ledger->epsilon() : 0.0;
        if (epoch_norms.size() >= 2) {
            log.norms = grad_norm_diagnostics(epoch_norms, cfg.clip_norm);
        }
        result.logs.push_back(log);
        if (log_stream) {
            (*log_stream) << "epoch " << log.epoch << " loss " << log.mean_loss;
            if (state.ledger) (*log_stream) << " eps " << log.epsilon;
            (*log_stream) << " relvar " << log.norms.rel_variance << " clipped "
                          << log.norms.fraction_clipped << '\n';
        }

        state.epochs_completed = epoch + 1;
        if (result.budget_stopped) break;
    }
    return result;
}

void write_train_log_csv(const std::string& path, std::span<const EpochLog> logs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("train log: cannot write '" + path + "'");
    out << "epoch,mean_loss,epsilon,norm_mean,norm_var,norm_relvar,norm_skew,"
           "frac_clipped\n";
    for (const auto& log : logs) {
        out << log.epoch << ',' << format_double(log.mean_loss) << ','
            << format_double(log.epsilon) << ',' << format_double(log.norms.mean) << ','
            << format_double(log.norms.variance) << ','
            << format_double(log.norms.rel_variance) << ','
            << format_double(log.norms.skewness) << ','
            << format_double(log.norms.fraction_clipped) << '\n';
    }
}

} // namespace dpfd
