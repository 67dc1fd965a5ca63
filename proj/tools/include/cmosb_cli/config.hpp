#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cmosb/attack.hpp"
#include "cmosb/he_scheme.hpp"
#include "cmosb/moo.hpp"
#include "cmosb/sbo.hpp"

namespace cmosb::cli {

// Bad config file, unknown key, unparsable value or out-of-range field. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSpec {
  std::string source = "synthetic";  // synthetic | csv
  std::size_t rows = 2000;
  std::size_t active_features = 5;
  std::size_t passive_features = 5;
  int classes = 2;
  double class_sep = 1.0;
  std::uint64_t seed = 7;
  std::filesystem::path csv_path;
  std::string label_column = "label";  // name, or a 0-based index
  int expected_classes = 0;
  std::size_t active_count = 0;  // 0: active_features for synthetic, half the columns for csv
};

struct ExperimentConfig {
  DataSpec data;
  std::uint64_t seed = 1;
  std::filesystem::path output = "cmosb_out";
  std::size_t workers = 0;  // 0: available parallelism

  std::size_t probe_per_class = 50;
  std::size_t known_per_class = 5;

  fed::HECostModel cost;
  fed::BackendKind backend = fed::BackendKind::Counting;
  int modulus_bits = 512;

  moo::GAConfig ga;
  moo::Constraints constraints;
  double z_utility = 1.0;
  double z_cost = 1000.0;
  double z_privacy = 1.0;
  bool binary_floor = true;  // p in [0.7, 1] when the dataset is binary
  bool campaign_complete_secure = true;

  fed::TrainingConfig train;
  std::string baseline;  // empty, or a baseline name replacing the train.* hyperparameters
  bool allow_below_binary_floor = false;

  attack::Linkage linkage = attack::Linkage::ConstrainedAverage;

  // Throws ConfigError naming the field.
  void validate() const;
  std::size_t worker_count() const;
  // Hyperparameters of `train`, after applying `baseline`.
  fed::TrainingConfig training_config() const;
};

// Reads an INI file over the defaults. Unknown sections or keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);
// Applies "section.key=value" on top of `config`.
void apply_override(ExperimentConfig& config, std::string_view assignment);
void set_value(ExperimentConfig& config, std::string_view key, std::string_view value);
// Every key with its current value and a one-line note, as a loadable INI file.
void print_config(const ExperimentConfig& config, std::ostream& out);

}  // namespace cmosb::cli
