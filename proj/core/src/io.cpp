#include "cherryvine/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cherryvine/error.hpp"

namespace cherryvine {

using nlohmann::json;

namespace {

std::string read_all(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError("JSON syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(column));
  }
}

const json& member(const json& object, const char* key) {
  if (!object.is_object() || !object.contains(key)) {
    throw InputError(std::string("missing field \"") + key + "\"");
  }
  return object.at(key);
}

Vertex vertex_of(const json& value) {
  if (!value.is_number_integer()) throw InputError("vertex labels must be integers");
  return value.get<Vertex>();
}

std::vector<Vertex> vertex_list(const json& value, const char* what) {
  if (!value.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<Vertex> out;
  for (const auto& v : value) out.push_back(vertex_of(v));
  return out;
}

std::vector<Hyperedge> cluster_list(const json& value) {
  if (!value.is_array()) throw InputError("\"clusters\" must be an array");
  std::vector<Hyperedge> out;
  for (const auto& c : value) {
    const auto members = vertex_list(c, "a cluster");
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (members[i] == members[j]) {
          throw InputError("cluster lists vertex " + std::to_string(members[i]) + " twice");
        }
      }
    }
    out.emplace_back(members);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_list(const json& value,
                                                           std::size_t clusters) {
  if (!value.is_array()) throw InputError("\"edges\" must be an array");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : value) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
        !e[1].is_number_unsigned()) {
      throw InputError("each edge must be a pair of cluster indices");
    }
    const auto i = e[0].get<std::size_t>();
    const auto j = e[1].get<std::size_t>();
    if (i >= clusters || j >= clusters) {
      throw InputError("edge [" + std::to_string(i) + "," + std::to_string(j) +
                       "] refers to a missing cluster");
    }
    out.emplace_back(i, j);
  }
  return out;
}

json cluster_json(std::span<const Hyperedge> clusters) {
  json out = json::array();
  for (const auto& c : clusters) out.push_back(std::vector<Vertex>(c.begin(), c.end()));
  return out;
}

json edge_json(std::span<const TreeEdge> edges) {
  json out = json::array();
  for (const auto& e : edges) out.push_back({e.first, e.second});
  return out;
}

VertexSet vertex_set_of(const json& doc) {
  try {
    return VertexSet(vertex_list(member(doc, "vertices"), "\"vertices\""));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

}  // namespace

StructureFile parse_structure(std::istream& in) {
  const json doc = parse_json(read_all(in));
  StructureFile file{vertex_set_of(doc), cluster_list(member(doc, "clusters")), std::nullopt};
  if (doc.contains("edges") && !doc.at("edges").is_null()) {
    file.edges = edge_list(doc.at("edges"), file.clusters.size());
  }
  return file;
}

StructureFile read_structure(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_structure(in);
}

JunctionTree to_junction_tree(const StructureFile& file) {
  if (file.edges) return JunctionTree(file.vertices, file.clusters, *file.edges);
  return build_junction_tree(file.vertices, file.clusters);
}

void write_structure(std::ostream& out, const JunctionTree& tree) {
  json doc;
  doc["vertices"] = std::vector<Vertex>(tree.vertices().labels().begin(),
                                        tree.vertices().labels().end());
  doc["clusters"] = cluster_json(tree.clusters());
  doc["edges"] = edge_json(tree.edges());
  out << doc.dump(2) << '\n';
}

VineModel parse_model(std::istream& in) {
  const json doc = parse_json(read_all(in));
  const VertexSet vertices = vertex_set_of(doc);
  const json& trees = member(doc, "trees");
  const std::size_t d = vertices.size();
  if (!trees.is_array() || trees.size() + 1 != d) {
    throw InputError("\"trees\" must hold d-1 = " + std::to_string(d - 1) + " entries");
  }

  std::vector<VertexPair> first_tree;
  std::vector<CherryTree> cherry_trees;
  for (std::size_t level = 1; level < d; ++level) {
    const json& entry = trees[level - 1];
    auto clusters = cluster_list(member(entry, "clusters"));
    const auto edges = edge_list(member(entry, "edges"), clusters.size());
    if (level == 1) {
      for (const auto& c : clusters) {
        if (c.size() != 1) throw InputError("tree 1 clusters must be singletons");
      }
      for (auto [i, j] : edges) first_tree.emplace_back(clusters[i][0], clusters[j][0]);
    } else {
      cherry_trees.emplace_back(static_cast<int>(level),
                                JunctionTree(vertices, std::move(clusters), edges));
    }
  }
  CherryVineStructure structure(vertices, std::move(first_tree), std::move(cherry_trees));

  std::map<PairLabel, BivariateCopula> assigned;
  const json& pairs = member(doc, "pair_copulas");
  if (!pairs.is_array()) throw InputError("\"pair_copulas\" must be an array");
  for (const auto& p : pairs) {
    PairLabel label(vertex_of(member(p, "a")), vertex_of(member(p, "b")),
                    Hyperedge(vertex_list(member(p, "S"), "\"S\"")));
    const json& family_field = member(p, "family");
    if (!family_field.is_string()) throw InputError("\"family\" must be a string");
    const Family family = parse_family(family_field.get<std::string>());
    double parameter = 0.0;
    if (family != Family::Independence) {
      const json& value = member(p, "parameter");
      if (!value.is_number()) throw InputError("\"parameter\" must be a number");
      parameter = value.get<double>();
    }
    if (!assigned.emplace(label, BivariateCopula(family, parameter)).second) {
      throw InputError("pair " + label.to_string() + " is assigned twice");
    }
  }
  std::vector<std::vector<BivariateCopula>> copulas;
  for (int level = 1; level <= structure.level_count(); ++level) {
    auto& row = copulas.emplace_back();
    for (const auto& label : structure.labels(level)) {
      auto it = assigned.find(label);
      if (it == assigned.end()) throw InputError("no copula for pair " + label.to_string());
      row.push_back(it->second);
      assigned.erase(it);
    }
  }
  if (!assigned.empty()) {
    throw InputError("pair " + assigned.begin()->first.to_string() + " is not a link of the vine");
  }
  return VineModel(std::move(structure), std::move(copulas));
}

VineModel read_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_model(in);
}

void write_model(std::ostream& out, const VineModel& model) {
  const CherryVineStructure& s = model.structure();
  json doc;
  doc["vertices"] = std::vector<Vertex>(s.vertices().labels().begin(), s.vertices().labels().end());
  json trees = json::array();
  json pairs = json::array();
  for (int level = 1; level <= s.level_count(); ++level) {
    const VineTree& t = s.tree(level);
    trees.push_back({{"clusters", cluster_json(t.nodes)}, {"edges", edge_json(t.links)}});
    const auto labels = s.labels(level);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const BivariateCopula& c = model.copula(level, i);
      json entry;
      entry["a"] = labels[i].a;
      entry["b"] = labels[i].b;
      entry["S"] = std::vector<Vertex>(labels[i].given.begin(), labels[i].given.end());
      entry["family"] = std::string(family_name(c.family()));
      if (c.is_independence()) entry["parameter"] = nullptr;
      else entry["parameter"] = c.parameter();
      pairs.push_back(std::move(entry));
    }
  }
  doc["trees"] = std::move(trees);
  doc["pair_copulas"] = std::move(pairs);
  out << doc.dump(2) << '\n';
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  std::string line;
  CsvTable table;
  if (!std::getline(in, line) || trim(line).empty()) throw InputError("CSV has no header row");
  for (auto cell : split_line(trim(line))) table.header.emplace_back(trim(cell));
  const std::size_t d = table.header.size();

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    ++rows;
    const auto cells = split_line(content);
    if (cells.size() != d) {
      throw InputError("row " + std::to_string(rows) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const std::string_view cell = trim(cells[j]);
      double x = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (cell.empty() || ec != std::errc{} || end != cell.data() + cell.size() ||
          !std::isfinite(x)) {
        throw InputError("non-numeric value \"" + std::string(cell) + "\" at row " +
                         std::to_string(rows) + ", column " + std::to_string(j + 1));
      }
      values.push_back(x);
    }
  }
  if (rows == 0) throw InputError("CSV has no data rows");
  table.values = Eigen::Map<PointMatrix>(values.data(), static_cast<Eigen::Index>(rows),
                                         static_cast<Eigen::Index>(d));
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_csv(in);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const PointMatrix& values) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << values(i, j);
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace cherryvine
