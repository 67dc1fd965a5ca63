#include "cmosb_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <functional>
#include <ostream>
#include <thread>
#include <vector>

#include "cmosb/cmosb.hpp"
#include "cmosb/error.hpp"

namespace cmosb::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T>
std::string fmt_int(T v) {
  return std::to_string(v);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("config: " + std::string(key) + " = '" + std::string(value) + "' is not " +
                    std::string(want));
}

template <class T>
T parse_number(std::string_view key, std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad(key, s, "a number");
  return v;
}

bool parse_bool(std::string_view key, std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad(key, s, "a boolean");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Field {
  std::string key;  // section.name
  std::string note;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

#define CMOSB_FIELD_DOUBLE(KEY, NOTE, MEMBER)                                          \
  Field{KEY, NOTE, [](const ExperimentConfig& c) { return fmt(c.MEMBER); },           \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = parse_number<double>(KEY, v); }}
#define CMOSB_FIELD_INT(KEY, NOTE, MEMBER, TYPE)                                          \
  Field{KEY, NOTE, [](const ExperimentConfig& c) { return fmt_int(c.MEMBER); },          \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = parse_number<TYPE>(KEY, v); }}
#define CMOSB_FIELD_BOOL(KEY, NOTE, MEMBER)                                     \
  Field{KEY, NOTE, [](const ExperimentConfig& c) { return fmt(c.MEMBER); },    \
        [](ExperimentConfig& c, std::string_view v) { c.MEMBER = parse_bool(KEY, v); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"data.source", "synthetic or csv",
            [](const ExperimentConfig& c) { return c.data.source; },
            [](ExperimentConfig& c, std::string_view v) {
              if (v != "synthetic" && v != "csv") bad("data.source", v, "synthetic or csv");
              c.data.source = v;
            }},
      CMOSB_FIELD_INT("data.rows", "synthetic instance count", data.rows, std::size_t),
      CMOSB_FIELD_INT("data.active_features", "synthetic active-party columns", data.active_features,
                      std::size_t),
      CMOSB_FIELD_INT("data.passive_features", "synthetic passive-party columns",
                      data.passive_features, std::size_t),
      CMOSB_FIELD_INT("data.classes", "synthetic class count", data.classes, int),
      CMOSB_FIELD_DOUBLE("data.class_sep", "synthetic centroid spread", data.class_sep),
      CMOSB_FIELD_INT("data.seed", "synthetic generator seed", data.seed, std::uint64_t),
      Field{"data.csv_path", "csv input (source = csv)",
            [](const ExperimentConfig& c) { return c.data.csv_path.string(); },
            [](ExperimentConfig& c, std::string_view v) { c.data.csv_path = std::string(v); }},
      Field{"data.label_column", "csv label column, name or 0-based index",
            [](const ExperimentConfig& c) { return c.data.label_column; },
            [](ExperimentConfig& c, std::string_view v) { c.data.label_column = v; }},
      CMOSB_FIELD_INT("data.expected_classes", "csv class count check, 0 skips", data.expected_classes,
                      int),
      CMOSB_FIELD_INT("data.active_count", "active-party columns, 0 picks the default",
                      data.active_count, std::size_t),

      CMOSB_FIELD_INT("experiment.seed", "campaign seed", seed, std::uint64_t),
      Field{"experiment.output", "output directory",
            [](const ExperimentConfig& c) { return c.output.string(); },
            [](ExperimentConfig& c, std::string_view v) { c.output = std::string(v); }},
      CMOSB_FIELD_INT("experiment.workers", "evaluation threads, 0 uses all cores", workers,
                      std::size_t),

      CMOSB_FIELD_INT("probe.per_class", "attack probe instances per class", probe_per_class,
                      std::size_t),
      CMOSB_FIELD_INT("probe.known_per_class", "probe labels known to the attacker per class",
                      known_per_class, std::size_t),

      CMOSB_FIELD_DOUBLE("cost.t_enc", "seconds per encryption", cost.t_enc),
      CMOSB_FIELD_DOUBLE("cost.t_dec", "seconds per decryption", cost.t_dec),
      CMOSB_FIELD_DOUBLE("cost.t_add", "seconds per homomorphic addition", cost.t_add),
      Field{"cost.backend", "counting or paillier",
            [](const ExperimentConfig& c) { return std::string(fed::to_string(c.backend)); },
            [](ExperimentConfig& c, std::string_view v) {
              auto k = fed::parse_backend(v);
              if (!k) bad("cost.backend", v, "counting or paillier");
              c.backend = *k;
            }},
      CMOSB_FIELD_INT("cost.modulus_bits", "paillier modulus size", modulus_bits, int),

      CMOSB_FIELD_INT("ga.population", "N, even", ga.population, std::size_t),
      CMOSB_FIELD_INT("ga.generations", "T", ga.generations, int),
      CMOSB_FIELD_DOUBLE("ga.crossover_binary", "single-point crossover probability",
                         ga.crossover_binary),
      CMOSB_FIELD_DOUBLE("ga.crossover_sbx", "SBX probability per gene", ga.crossover_sbx),
      CMOSB_FIELD_DOUBLE("ga.mutation_bitflip", "bit-flip probability per genome",
                         ga.mutation_bitflip),
      CMOSB_FIELD_DOUBLE("ga.mutation_polynomial", "polynomial mutation probability per gene",
                         ga.mutation_polynomial),
      CMOSB_FIELD_DOUBLE("ga.eta_c", "SBX distribution index", ga.eta_c),
      CMOSB_FIELD_DOUBLE("ga.eta_m", "polynomial mutation index", ga.eta_m),

      CMOSB_FIELD_BOOL("constraints.enabled", "penalize bound violations", constraints.enabled),
      CMOSB_FIELD_DOUBLE("constraints.phi_p", "privacy leakage bound", constraints.phi_p),
      CMOSB_FIELD_DOUBLE("constraints.phi_c", "training cost bound, seconds", constraints.phi_c),
      CMOSB_FIELD_DOUBLE("constraints.alpha_p", "privacy penalty coefficient", constraints.alpha_p),
      CMOSB_FIELD_DOUBLE("constraints.alpha_c", "cost penalty coefficient", constraints.alpha_c),

      CMOSB_FIELD_DOUBLE("hv.z_utility", "reference point, utility loss", z_utility),
      CMOSB_FIELD_DOUBLE("hv.z_cost", "reference point, seconds; also the failed-run cost", z_cost),
      CMOSB_FIELD_DOUBLE("hv.z_privacy", "reference point, privacy leakage", z_privacy),

      CMOSB_FIELD_BOOL("campaign.binary_floor", "binary data: search p in [0.7, 1]", binary_floor),
      CMOSB_FIELD_BOOL("campaign.complete_secure", "first searched tree uses active features only",
                       campaign_complete_secure),

      CMOSB_FIELD_INT("train.n_f", "federated rounds", train.federated_rounds, int),
      CMOSB_FIELD_INT("train.n_l", "local rounds", train.local_rounds, int),
      CMOSB_FIELD_INT("train.d", "max depth", train.max_depth, int),
      CMOSB_FIELD_DOUBLE("train.r", "subsample rate", train.subsample),
      CMOSB_FIELD_DOUBLE("train.p", "purity threshold", train.purity_threshold),
      CMOSB_FIELD_DOUBLE("train.eta", "learning rate", train.learning_rate),
      CMOSB_FIELD_BOOL("train.complete_secure", "first tree uses active features only",
                       train.complete_secure),
      CMOSB_FIELD_BOOL("train.purity_defense", "grow pure nodes locally", train.purity_defense),
      Field{"train.baseline", "empty, fate, emperical or vf2boost",
            [](const ExperimentConfig& c) { return c.baseline; },
            [](ExperimentConfig& c, std::string_view v) { c.baseline = v; }},
      CMOSB_FIELD_BOOL("train.allow_below_binary_floor", "accept p < 0.7 on binary data",
                       allow_below_binary_floor),

      Field{"attack.linkage", "constrained or average",
            [](const ExperimentConfig& c) {
              return std::string(c.linkage == attack::Linkage::Average ? "average" : "constrained");
            },
            [](ExperimentConfig& c, std::string_view v) {
              if (v == "average")
                c.linkage = attack::Linkage::Average;
              else if (v == "constrained")
                c.linkage = attack::Linkage::ConstrainedAverage;
              else
                bad("attack.linkage", v, "constrained or average");
            }},
  };
  return table;
}

#undef CMOSB_FIELD_DOUBLE
#undef CMOSB_FIELD_INT
#undef CMOSB_FIELD_BOOL

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

}  // namespace

void set_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("config: unknown key '" + std::string(key) + "'");
  f->set(config, trim(value));
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("config: override '" + std::string(assignment) + "' is not key=value");
  set_value(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config: file '" + path.string() + "' does not exist");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty())
      throw ConfigError("config: key '" + section + "' lies outside any section");
    for (const auto& [name, leaf] : body) set_value(config, section + "." + name, leaf.data());
  }
  return config;
}

void print_config(const ExperimentConfig& config, std::ostream& out) {
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string s = f.key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << "; " << f.note << '\n' << f.key.substr(dot + 1) << " = " << f.get(config) << '\n';
  }
}

std::size_t ExperimentConfig::worker_count() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

fed::TrainingConfig ExperimentConfig::training_config() const {
  if (baseline.empty()) return train;
  for (const auto& b : moo::baselines())
    if (lower(b.name) == lower(baseline)) return b.config;
  throw ConfigError("config: train.baseline '" + baseline +
                    "' is not one of fate, emperical, vf2boost");
}

void ExperimentConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  if (data.source == "synthetic") {
    need(data.classes >= 2, "data.classes must be at least 2");
    need(data.rows >= 2 * static_cast<std::size_t>(data.classes),
         "data.rows must be at least twice data.classes");
    need(data.active_features >= 1, "data.active_features must be at least 1");
    need(data.passive_features >= 1, "data.passive_features must be at least 1");
    need(data.class_sep > 0.0, "data.class_sep must be positive");
    need(data.active_count < data.active_features + data.passive_features,
         "data.active_count must leave the passive party a column");
  } else {
    need(!data.csv_path.empty(), "data.csv_path is required when data.source = csv");
    need(std::filesystem::exists(data.csv_path),
         "data.csv_path '" + data.csv_path.string() + "' does not exist");
    need(!data.label_column.empty(), "data.label_column is empty");
    need(data.expected_classes >= 0, "data.expected_classes must be non-negative");
  }
  need(probe_per_class >= 1, "probe.per_class must be at least 1");
  need(known_per_class >= 1, "probe.known_per_class must be at least 1");
  need(modulus_bits >= 64, "cost.modulus_bits must be at least 64");
  need(z_utility > 0.0 && z_cost > 0.0 && z_privacy > 0.0, "hv.z_* must be positive");
  need(!output.empty(), "experiment.output is empty");
  try {
    cost.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    ga.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    constraints.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const auto t = training_config();
  try {
    t.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const bool binary = data.source == "synthetic" ? data.classes == 2 : data.expected_classes == 2;
  if (binary && binary_floor && !allow_below_binary_floor && t.purity_defense)
    need(t.purity_threshold >= moo::kBinaryPurityRange.lo,
         "train.p must be in [0.7, 1] on binary data; set train.allow_below_binary_floor to go lower");
}

}  // namespace cmosb::cli
