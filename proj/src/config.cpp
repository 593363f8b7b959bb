#include "dpfindiff/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dpfindiff/errors.hpp"

namespace dpfd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" +
                          value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + value + "'");
}

} // namespace

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> items;
    std::string cur;
    std::istringstream is(csv);
    while (std::getline(is, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) items.push_back(cur);
    }
    return items;
}

void set_config_value(RunConfig& cfg, const std::string& section,
                      const std::string& key, const std::string& value) {
    const std::string full = section.empty() ? key : section + "." + key;
    if (section == "data") {
        if (key == "train") cfg.train_path = value;
        else if (key == "test") cfg.test_path = value;
        else if (key == "numeric") cfg.numeric_columns = split_list(value);
        else if (key == "categorical") cfg.categorical_columns = split_list(value);
        else if (key == "label") cfg.label_column = value;
        else if (key == "subsample") cfg.subsample_rows = parse_uint(full, value);
        else throw ConfigError("config: unknown key '" + full + "'");
    } else if (section == "model") {
        if (key == "hidden") cfg.hidden = parse_uint(full, value);
        else if (key == "d_e") cfg.d_e = parse_uint(full, value);
        else if (key == "time_dim") cfg.time_dim = parse_uint(full, value);
        else if (key == "timesteps") cfg.timesteps = parse_uint(full, value);
        else if (key == "beta_start") cfg.beta_start = parse_double(full, value);
        else if (key == "beta_end") cfg.beta_end = parse_double(full, value);
        else throw ConfigError("config: unknown key '" + full + "'");
    } else if (section == "training") {
        if (key == "epochs") cfg.epochs = parse_uint(full, value);
        else if (key == "batch") cfg.batch_size = parse_uint(full, value);
        else if (key == "learning_rate") cfg.learning_rate = parse_double(full, value);
        else if (key == "loss") cfg.loss = value;
        else if (key == "sampler") cfg.sampler = value;
        else if (key == "alpha_start") cfg.alpha_start = parse_double(full, value);
        else if (key == "alpha_end") cfg.alpha_end = parse_double(full, value);
        else if (key == "is_correction") cfg.is_correction = parse_bool(full, value);
        else throw ConfigError("config: unknown key '" + full + "'");
    } else if (section == "privacy") {
        if (key == "enabled") cfg.dp_enabled = parse_bool(full, value);
        else if (key == "epsilon") cfg.epsilon_target = parse_double(full, value);
        else if (key == "sigma") cfg.sigma = parse_double(full, value);
        else if (key == "delta") cfg.delta = parse_double(full, value);
        else if (key == "clip") cfg.clip_norm = parse_double(full, value);
        else throw ConfigError("config: unknown key '" + full + "'");
    } else if (section == "run") {
        if (key == "seed") cfg.seed = parse_uint(full, value);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "threads") cfg.threads = static_cast<int>(parse_uint(full, value));
        else throw ConfigError("config: unknown key '" + full + "'");
    } else {
        throw ConfigError("config: unknown section '" + section + "'");
    }
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        set_config_value(cfg, section, key, value);
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

void RunConfig::validate() const {
    if (train_path.empty()) throw ConfigError("config: data.train is required");
    if (epochs < 1) throw ConfigError("config: training.epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("config: training.batch must be >= 1");
    if (hidden < 1 || d_e < 1) throw ConfigError("config: model widths must be >= 1");
    if (time_dim < 2 || time_dim % 2 != 0) {
        throw ConfigError("config: model.time_dim must be even and >= 2");
    }
    if (timesteps < 1) throw ConfigError("config: model.timesteps must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("config: learning rate must be > 0");
    if (loss != "mse" && loss != "fa") {
        throw ConfigError("config: training.loss must be mse or fa");
    }
    if (sampler != "uniform" && sampler != "at") {
        throw ConfigError("config: training.sampler must be uniform or at");
    }
    if (dp_enabled) {
        if (epsilon_target && sigma) {
            throw ConfigError("config: privacy.epsilon and privacy.sigma are mutually "
                              "exclusive");
        }
        if (!epsilon_target && !sigma) {
            throw ConfigError("config: DP training needs privacy.epsilon or privacy.sigma");
        }
        if (!(clip_norm > 0.0)) throw ConfigError("config: privacy.clip must be > 0");
        if (!(delta > 0.0) || delta >= 1.0) {
            throw ConfigError("config: privacy.delta must be in (0, 1)");
        }
        if (sigma && *sigma < 0.0) throw ConfigError("config: privacy.sigma must be >= 0");
        if (epsilon_target && !(*epsilon_target > 0.0)) {
            throw ConfigError("config: privacy.epsilon must be > 0");
        }
    }
}

} // namespace dpfd
