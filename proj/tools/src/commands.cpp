#include "cmosb_cli/commands.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cmosb/cmosb.hpp"
#include "cmosb/error.hpp"
#include "cmosb/evaluation.hpp"
#include "cmosb/serialize.hpp"
#include "cmosb_cli/svg.hpp"

namespace cmosb::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return path;
}

fs::path write_json(const fs::path& path, const json& doc) { return write_file(path, doc.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IngestionError("'" + path.string() + "' is not JSON: " + e.what());
  }
}

data::LabelColumn label_column(const std::string& s) {
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
  if (ec == std::errc() && ptr == s.data() + s.size()) return idx;
  return s;
}

std::string config_row(const fed::TrainingConfig& c) {
  return std::to_string(c.federated_rounds) + ',' + std::to_string(c.local_rounds) + ',' +
         std::to_string(c.max_depth) + ',' + num(c.subsample) + ',' + num(c.purity_threshold) + ',' +
         num(c.learning_rate);
}

std::string objective_row(const objectives::ObjectiveVector& v) {
  return num(v.utility_loss) + ',' + num(v.training_cost) + ',' + num(v.privacy_leakage);
}

constexpr const char* kFrontHeader = "n_f,n_l,d,r,p,eta,utility_loss,training_cost,privacy_leakage\n";

json solution_json(const fed::TrainingConfig& c, const objectives::ObjectiveVector& v) {
  return {{"config", io::to_json(c)}, {"objectives", io::to_json(v)}};
}

}  // namespace

std::shared_ptr<const data::Dataset> load_dataset(const ExperimentConfig& config) {
  const auto& d = config.data;
  if (d.source == "csv")
    return std::make_shared<data::Dataset>(
        data::load_csv(d.csv_path, label_column(d.label_column), d.expected_classes));
  return std::make_shared<data::Dataset>(data::generate_synthetic(
      d.rows, d.active_features, d.passive_features, d.classes, d.class_sep, d.seed));
}

fed::ContextOptions context_options(const ExperimentConfig& config, const data::Dataset& dataset) {
  fed::ContextOptions o;
  o.active_count = config.data.active_count;
  if (o.active_count == 0 && config.data.source == "synthetic") o.active_count = config.data.active_features;
  if (o.active_count >= dataset.cols())
    throw ConfigError("config: data.active_count must leave the passive party a column");
  o.probe_per_class = config.probe_per_class;
  o.known_per_class = config.known_per_class;
  o.cost_model = config.cost;
  o.backend = config.backend;
  o.modulus_bits = config.modulus_bits;
  return o;
}

Paths cmd_gen_data(const ExperimentConfig& config) {
  const auto ds = load_dataset(config);
  const auto opts = context_options(config, *ds);
  std::ostringstream csv;
  data::write_csv(*ds, csv);
  json side = io::stamped("dataset");
  side["source"] = config.data.source;
  side["seed"] = config.data.source == "synthetic" ? config.data.seed : ds->seed;
  side["rows"] = ds->rows();
  side["columns"] = ds->cols();
  side["classes"] = ds->class_count;
  side["active_count"] = opts.active_count ? opts.active_count : std::max<std::size_t>(1, ds->cols() / 2);
  side["label_column"] = "label";
  if (config.data.source == "synthetic") side["class_sep"] = config.data.class_sep;
  return {write_file(config.output / "dataset.csv", csv.str()), write_json(config.output / "dataset.json", side)};
}

Paths cmd_train(const ExperimentConfig& config) {
  const auto ds = load_dataset(config);
  const auto ctx = fed::TrainingContext::prepare(ds, context_options(config, *ds), config.seed);
  const auto tc = config.training_config();
  const auto result = fed::sbo_train(tc, ctx, objectives::evaluation_seed(config.seed, tc));

  io::LeafLogDocument log{result.log, ctx.probe_rows, ctx.probe_labels, ctx.knowledge, ds->class_count};
  json report = io::run_report(tc, result, config.seed);
  if (!config.baseline.empty()) report["baseline"] = config.baseline;
  return {write_json(config.output / "forest.json", io::to_json(result.forest)),
          write_json(config.output / "leaf_log.json", io::to_json(log)),
          write_json(config.output / "report.json", report)};
}

Paths cmd_attack(const ExperimentConfig& config, const fs::path& leaf_log,
                 const std::optional<fs::path>& forest) {
  if (!fs::exists(leaf_log)) throw ConfigError("leaf log '" + leaf_log.string() + "' does not exist");
  if (forest && !fs::exists(*forest)) throw ConfigError("forest '" + forest->string() + "' does not exist");
  const auto doc = io::leaf_log_from_json(read_json(leaf_log));
  if (forest) {
    const auto f = io::forest_from_json(read_json(*forest));
    if (f.class_count != doc.class_count)
      throw IngestionError("forest and leaf log disagree on the class count");
  }
  const auto report = attack::run_attack(doc.log, doc.probe_rows, doc.probe_labels, doc.knowledge,
                                         doc.class_count, config.linkage);
  return {write_json(config.output / "attack_report.json", io::to_json(report))};
}

Paths cmd_optimize(const ExperimentConfig& config) {
  const auto ds = load_dataset(config);
  auto ctx = std::make_shared<const fed::TrainingContext>(
      fed::TrainingContext::prepare(ds, context_options(config, *ds), config.seed));
  auto evaluator = std::make_shared<objectives::SolutionEvaluator>(ctx, config.seed, config.z_cost);
  moo::DecodeOptions decode_options;
  decode_options.binary_campaign = config.binary_floor && ds->class_count == 2;
  decode_options.complete_secure = config.campaign_complete_secure;
  moo::SboProblem problem(evaluator, decode_options, config.worker_count());

  moo::GAConfig ga = config.ga;
  ga.seed = config.seed;
  const auto terms = config.constraints.terms();
  moo::HypervolumeSettings hv{{config.z_utility, config.z_cost, config.z_privacy},
                              {config.z_utility, config.z_cost, config.z_privacy}};
  const auto run = moo::cmosb_run(ga, terms, problem, hv);

  std::string front_csv = kFrontHeader;
  json front = json::array();
  for (std::size_t i : run.front) {
    const auto& s = run.population[i];
    const auto tc = moo::decode(s.genome, decode_options);
    const auto v = objectives::ObjectiveVector::from(s.raw);
    front_csv += config_row(tc) + ',' + objective_row(v) + '\n';
    front.push_back(solution_json(tc, v));
  }
  json archive = json::array();
  for (const auto& e : run.archive) {
    json entry = solution_json(moo::decode(e.genome, decode_options), objectives::ObjectiveVector::from(e.raw));
    entry["generation"] = e.generation;
    archive.push_back(std::move(entry));
  }
  std::string trace_csv = "generation,hypervolume\n";
  for (std::size_t g = 0; g < run.hypervolume_trace.size(); ++g)
    trace_csv += std::to_string(g) + ',' + num(run.hypervolume_trace[g]) + '\n';

  std::string base_csv = std::string("name,") + kFrontHeader;
  json base = json::array();
  for (const auto& b : moo::baselines()) {
    const auto e = evaluator->evaluate(b.config);
    base_csv += b.name + ',' + config_row(b.config) + ',' + objective_row(e.objectives) + '\n';
    json row = solution_json(b.config, e.objectives);
    row["name"] = b.name;
    base.push_back(std::move(row));
  }

  json doc = io::stamped("front");
  doc["seed"] = config.seed;
  doc["population"] = ga.population;
  doc["generations"] = ga.generations;
  doc["reference"] = hv.reference;
  doc["constraints"] = {{"enabled", config.constraints.enabled},
                        {"phi_p", config.constraints.phi_p},
                        {"phi_c", config.constraints.phi_c},
                        {"alpha_p", config.constraints.alpha_p},
                        {"alpha_c", config.constraints.alpha_c}};
  doc["front"] = std::move(front);
  doc["baselines"] = std::move(base);
  doc["archive"] = std::move(archive);
  doc["hypervolume"] = run.hypervolume_trace;
  doc["clipped_points"] = run.clipped_points;
  doc["evaluations"] = evaluator->evaluations();

  return {write_file(config.output / "front.csv", front_csv), write_json(config.output / "front.json", doc),
          write_file(config.output / "hv_trace.csv", trace_csv),
          write_file(config.output / "baselines.csv", base_csv)};
}

Paths cmd_plot(const fs::path& front_json, const std::optional<fs::path>& trace_csv, const fs::path& output) {
  if (!fs::exists(front_json)) throw ConfigError("front '" + front_json.string() + "' does not exist");
  if (trace_csv && !fs::exists(*trace_csv)) throw ConfigError("trace '" + trace_csv->string() + "' does not exist");
  const json doc = read_json(front_json);
  io::check_schema(doc, "front");
  if (!doc.contains("front") || !doc["front"].is_array())
    throw IngestionError("front file has no front array");
  if (doc["front"].empty()) throw IngestionError("front file holds no solution");

  auto objectives_of = [](const json& j) {
    try {
      const auto& o = j.at("objectives");
      return std::array<double, 3>{o.at("utility_loss").get<double>(), o.at("training_cost").get<double>(),
                                   o.at("privacy_leakage").get<double>()};
    } catch (const json::exception& e) {
      throw IngestionError(std::string("front file: malformed objectives: ") + e.what());
    }
  };
  std::vector<std::array<double, 3>> pts;
  for (const auto& s : doc["front"]) pts.push_back(objectives_of(s));
  std::vector<std::pair<std::string, std::array<double, 3>>> base;
  if (doc.contains("baselines"))
    for (const auto& b : doc["baselines"]) base.emplace_back(b.value("name", "baseline"), objectives_of(b));

  std::vector<std::pair<double, double>> trace;
  if (trace_csv) {
    std::ifstream in(*trace_csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("generation,hypervolume", 0) != 0)
      throw IngestionError("trace file lacks the generation,hypervolume header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      double g = 0, h = 0;
      const char* b = line.data();
      const char* e = b + line.size();
      if (comma == std::string::npos || std::from_chars(b, b + comma, g).ec != std::errc() ||
          std::from_chars(b + comma + 1, e, h).ec != std::errc())
        throw IngestionError("trace file: malformed row '" + line + "'");
      trace.emplace_back(g, h);
    }
  }

  // Axis codes: UL utility loss, TC training cost, PL privacy leakage.
  struct Projection {
    const char* file;
    const char* title;
    int x;
    int y;
  };
  const Projection projections[] = {{"front_pl_ul.svg", "PL-UL", 2, 0},
                                    {"front_tc_ul.svg", "TC-UL", 1, 0},
                                    {"front_pl_tc.svg", "PL-TC", 2, 1}};
  const char* names[] = {"UL", "TC", "PL"};
  std::vector<std::pair<fs::path, std::string>> files;
  for (const auto& p : projections) {
    ScatterPlot plot;
    plot.title = p.title;
    plot.x_label = names[p.x];
    plot.y_label = names[p.y];
    for (const auto& v : pts) plot.points.emplace_back(v[p.x], v[p.y]);
    for (const auto& [name, v] : base) plot.baselines.push_back({name, v[p.x], v[p.y]});
    files.emplace_back(output / p.file, render_svg(plot));
  }
  if (trace_csv) {
    LinePlot line{"Hypervolume", "generation", "HV", trace};
    files.emplace_back(output / "hv_trace.svg", render_svg(line));
  }
  Paths out;
  for (const auto& [path, text] : files) out.push_back(write_file(path, text));
  return out;
}

}  // namespace cmosb::cli
