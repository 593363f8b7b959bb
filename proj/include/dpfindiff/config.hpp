#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dpfd {

// Full run description. Flat key = value file with one section per module;
// CLI flags mirror the keys and override file values.
struct RunConfig {
    // [data]
    std::string train_path;
    std::string test_path;
    std::vector<std::string> numeric_columns;
    std::vector<std::string> categorical_columns; // empty: every other column
    std::optional<std::string> label_column;
    std::size_t subsample_rows = 0; // 0 = use all rows

    // [model]
    std::size_t hidden = 512;
    std::size_t d_e = 2;
    std::size_t time_dim = 64;
    std::size_t timesteps = 500;
    double beta_start = 1e-4;
    double beta_end = 0.02;

    // [training]
    std::size_t epochs = 1000;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    std::string loss = "mse";        // mse | fa
    std::string sampler = "uniform"; // uniform | at
    double alpha_start = 3.0;
    double alpha_end = -1.0;
    bool is_correction = false;

    // [privacy]
    bool dp_enabled = true;
    std::optional<double> epsilon_target;
    std::optional<double> sigma;
    double delta = 1e-5;
    double clip_norm = 1.0;

    // [run]
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int threads = 0; // 0 = runtime default

    void validate() const; // throws ConfigError
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text);

// Applies one "section.key = value" assignment; used by both the file
// parser and the CLI override flags.
void set_config_value(RunConfig& cfg, const std::string& section,
                      const std::string& key, const std::string& value);

std::vector<std::string> split_list(const std::string& csv);

} // namespace dpfd
