#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cherryvine/error.hpp"
#include "cherryvine/evaluate.hpp"
#include "cherryvine/io.hpp"
#include "cherryvine/junction_copula.hpp"
#include "cherryvine/learn.hpp"
#include "cherryvine/vine.hpp"

namespace cherryvine::cli {

namespace {

struct RunConfig {
  std::string data;
  std::string structure;
  std::vector<std::string> models;
  std::string out;
  std::optional<int> k;
  std::string families;
  std::uint64_t seed = kDefaultSeed;
  double alpha = 0.0;
  std::optional<std::size_t> n;
};

// Writes to --out when given, otherwise to standard output.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) out << text;
  else write_text_file(cfg.out, text);
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw InputError(std::string("missing required flag ") + flag);
  return value;
}

int require_k(const RunConfig& cfg) {
  if (!cfg.k) throw InputError("missing required flag --k");
  return *cfg.k;
}

std::vector<Family> parse_families(const std::string& list) {
  std::vector<Family> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const Family f = parse_family(item);
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  if (out.empty()) throw InputError("--families lists no family");
  return out;
}

std::string hyperedge_list(std::span<const Hyperedge> sets) {
  std::string s;
  for (const auto& h : sets) s += (s.empty() ? "" : " ") + h.to_string();
  return s;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const StructureFile file = read_structure(require(cfg.structure, "--structure"));
  ValidationReport report = validate_hypergraph(file.vertices, file.clusters);
  if (report.valid && file.edges) {
    try {
      JunctionTree(file.vertices, file.clusters, *file.edges);
    } catch (const DomainError& e) {
      report.valid = false;
      report.witness_ordering.reset();
      report.violations.push_back({"tree", e.what(), {}});
    }
  }

  nlohmann::json doc;
  doc["valid"] = report.valid;
  doc["violations"] = nlohmann::json::array();
  for (const auto& v : report.violations) {
    nlohmann::json offending = nlohmann::json::array();
    for (const auto& h : v.offending) offending.push_back(std::vector<Vertex>(h.begin(), h.end()));
    doc["violations"].push_back(
        {{"rule", v.rule}, {"description", v.description}, {"offending", offending}});
  }
  if (report.witness_ordering) doc["witness_ordering"] = *report.witness_ordering;
  else doc["witness_ordering"] = nullptr;
  if (!cfg.out.empty()) write_text_file(cfg.out, doc.dump(2) + "\n");

  if (report.valid) {
    out << "valid; running-intersection ordering:";
    for (auto i : *report.witness_ordering) out << ' ' << i;
    out << '\n';
    return 0;
  }
  for (const auto& v : report.violations) out << v.rule << ": " << v.description << '\n';
  return 1;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const CsvTable table = read_csv(require(cfg.data, "--data"));
  const std::string target = require(cfg.out, "--out");
  FitOptions options;
  if (!cfg.families.empty()) options.families = parse_families(cfg.families);
  options.alpha = cfg.alpha;
  const PseudoObservations po = pseudo_observations(table.values, cfg.seed);
  const VineModel model = fit_truncated_vine(po, require_k(cfg), options);

  std::ostringstream text;
  write_model(text, model);
  write_text_file(target, text.str());

  const CherryVineStructure& s = model.structure();
  out << std::setprecision(17);
  for (int level = 1; level <= s.level_count(); ++level) {
    const auto labels = s.labels(level);
    int dependent = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      dependent += model.copula(level, i).is_independence() ? 0 : 1;
    }
    out << "tree " << level << ": clusters " << hyperedge_list(s.tree(level).nodes) << "; "
        << dependent << " of " << labels.size() << " links dependent\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out << "  " << labels[i].to_string() << ' ' << model.copula(level, i).to_string() << '\n';
    }
  }
  out << "log-likelihood: " << log_likelihood(model, po) << '\n';
  return 0;
}

const std::string& first_model(const RunConfig& cfg) {
  if (cfg.models.empty()) throw InputError("missing required flag --model");
  return cfg.models.front();
}

int cmd_density(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const VineModel model = read_model(first_model(cfg));
  CsvTable table = read_csv(require(cfg.data, "--data"));
  if (table.values.cols() != model.dimension()) {
    throw InputError("points have " + std::to_string(table.values.cols()) +
                     " columns, model has " + std::to_string(model.dimension()));
  }
  std::size_t clamped = 0;
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      const double x = table.values(i, j);
      if (!(x > kUnitClamp && x < 1.0 - kUnitClamp)) ++clamped;
    }
  }
  if (clamped > 0) {
    err << "warning: " << clamped << " coordinates outside (" << kUnitClamp << ", 1 - "
        << kUnitClamp << ") were clamped\n";
  }
  PointMatrix result(table.values.rows(), 1);
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    const std::span<const double> row(table.values.data() + i * table.values.cols(),
                                      static_cast<std::size_t>(table.values.cols()));
    result(i, 0) = model.log_density(row);
  }
  std::ostringstream text;
  write_csv(text, {"log_density"}, result);
  emit(cfg, out, text.str());
  return 0;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const VineModel model = read_model(first_model(cfg));
  if (!cfg.n) throw InputError("missing required flag --n");
  const PointMatrix draws = model.sample(*cfg.n, cfg.seed);
  std::vector<std::string> header;
  for (Vertex v : model.structure().vertices().labels()) header.push_back("u" + std::to_string(v));
  std::ostringstream text;
  write_csv(text, header, draws);
  emit(cfg, out, text.str());
  return 0;
}

int cmd_truncate(const RunConfig& cfg, std::ostream& out) {
  const VineModel model = read_model(first_model(cfg));
  std::ostringstream text;
  write_model(text, truncate(model, require_k(cfg)));
  emit(cfg, out, text.str());
  return 0;
}

int cmd_transform(const RunConfig& cfg, std::ostream& out) {
  const StructureFile file = read_structure(require(cfg.structure, "--structure"));
  const CherryTree ct = junction_tree_to_cherry_tree(to_junction_tree(file), require_k(cfg));
  std::ostringstream text;
  write_structure(text, ct.tree());
  emit(cfg, out, text.str());
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  if (cfg.models.empty() || (cfg.models.size() < 2 && !cfg.k)) {
    throw InputError("compare needs a reference and at least one model");
  }
  const VineModel full_reference = read_model(cfg.models.front());
  const VineModel reference = cfg.k ? truncate(full_reference, *cfg.k) : full_reference;
  std::vector<ComparisonCandidate> candidates;
  for (const auto& path : cfg.models) {
    VineModel model = read_model(path);
    if (model.dimension() != reference.dimension()) {
      throw InputError("model " + path + " differs in dimension from the reference");
    }
    if (cfg.k) {
      const int k = *cfg.k;
      VineModel truncated = truncate(model, k);
      const int p = truncated.parameter_count();
      candidates.push_back(make_candidate(path + "@truncated" + std::to_string(k), truncated));
      candidates.push_back(make_candidate(path + "@cherry" + std::to_string(k + 1),
                                          to_cherry_tree_copula(truncated, k), p));
    } else {
      candidates.push_back(make_candidate(path, std::move(model)));
    }
  }
  std::optional<PseudoObservations> data;
  if (!cfg.data.empty()) data = pseudo_observations(read_csv(cfg.data).values, cfg.seed);
  const auto rows = compare_models(reference, candidates, cfg.n.value_or(10000), cfg.seed,
                                   data ? &*data : nullptr);
  std::ostringstream text;
  write_comparison_csv(text, rows);
  emit(cfg, out, text.str());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cherry-tree and cherry-vine copula toolkit", "cherryvine"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output file (standard output when omitted)");
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  };
  auto* validate = app.add_subcommand("validate", "Check a structure file");
  validate->add_option("--structure", cfg.structure, "Structure JSON")->required();
  validate->add_option("--out", cfg.out, "Write the JSON report here");

  auto* fit = app.add_subcommand("fit", "Fit a truncated cherry-vine to data");
  fit->add_option("--data", cfg.data, "CSV data with header")->required();
  fit->add_option("--k", cfg.k, "Truncation level")->required();
  fit->add_option("--families", cfg.families, "Comma-separated family pool");
  fit->add_option("--alpha", cfg.alpha, "Independence test level (0 disables)");
  add_common(fit);

  auto* density = app.add_subcommand("density", "Log copula densities of points");
  density->add_option("--model", cfg.models, "Model JSON")->required()->expected(1);
  density->add_option("--data", cfg.data, "CSV points with header")->required();
  density->add_option("--out", cfg.out, "Output CSV");

  auto* sample = app.add_subcommand("sample", "Draw from a model");
  sample->add_option("--model", cfg.models, "Model JSON")->required()->expected(1);
  sample->add_option("--n", cfg.n, "Number of draws")->required();
  add_common(sample);

  auto* trunc = app.add_subcommand("truncate", "Truncate a model at level k");
  trunc->add_option("--model", cfg.models, "Model JSON")->required()->expected(1);
  trunc->add_option("--k", cfg.k, "Truncation level")->required();
  trunc->add_option("--out", cfg.out, "Output model JSON");

  auto* transform = app.add_subcommand("transform", "Junction tree to k-th order cherry tree");
  transform->add_option("--structure", cfg.structure, "Structure JSON")->required();
  transform->add_option("--k", cfg.k, "Cherry tree order")->required();
  transform->add_option("--out", cfg.out, "Output structure JSON");

  auto* compare = app.add_subcommand("compare", "Compare models against a reference");
  compare->add_option("--model", cfg.models, "Model JSON; the first is the reference")
      ->required();
  compare->add_option("--n", cfg.n, "Monte-Carlo draws (default 10000)");
  compare->add_option("--data", cfg.data, "Score information criteria on this CSV instead");
  compare->add_option("--k", cfg.k, "Truncate every model, the reference included, at level k and add cherry-tree forms");
  add_common(compare);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*validate) return cmd_validate(cfg, out);
    if (*fit) return cmd_fit(cfg, out);
    if (*density) return cmd_density(cfg, out, err);
    if (*sample) return cmd_sample(cfg, out);
    if (*trunc) return cmd_truncate(cfg, out);
    if (*transform) return cmd_transform(cfg, out);
    if (*compare) return cmd_compare(cfg, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cherryvine::cli
