#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "dpfindiff/at_sampler.hpp"
#include "dpfindiff/config.hpp"
#include "dpfindiff/dp.hpp"
#include "dpfindiff/model.hpp"

namespace dpfd {

// Complete training-time state; exactly what a checkpoint round-trips.
struct TrainerState {
    RunConfig config;
    TrainableModel model;
    AdamState adam;
    ATSamplerState at;
    std::optional<PrivacyLedger> ledger;
    Rng rng;
    std::size_t epochs_completed = 0;
    bool budget_stopped = false;

    LossKind loss_kind() const { return parse_loss_kind(config.loss); }
};

struct EpochLog {
    std::size_t epoch = 0; // 1-based
    double mean_loss = 0.0;
    double epsilon = 0.0;
    GradNormStats norms;
};

struct TrainResult {
    std::vector<EpochLog> logs;
    bool budget_stopped = false;
};

// Fits schema + scaler on the raw table, initializes parameters and, when
// an epsilon target is set, calibrates sigma for the full step budget.
TrainerState init_trainer(const RunConfig& cfg, const CsvTable& train_table);

// Loads, subsamples and standardizes the training table against the state's
// schema/scaler. Shared by fresh runs and resumed ones.
Dataset prepare_training_data(const TrainerState& state, const CsvTable& table);

// Runs epochs [epochs_completed, target_epochs). Stops cleanly on budget
// exhaustion. `log_stream`, when set, receives one line per epoch.
TrainResult train(TrainerState& state, const Dataset& data,
                  std::size_t target_epochs,
                  exec::Mode mode = exec::Mode::Parallel,
                  std::ostream* log_stream = nullptr);

void write_train_log_csv(const std::string& path,
                         std::span<const EpochLog> logs);

} // namespace dpfd
