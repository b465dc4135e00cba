#pragma once

// Text formats: JSON structure and model files, CSV data.
//
// Structure: {"vertices":[1,2,3], "clusters":[[1,2],[2,3]], "edges":[[0,1]]}
// with 1-based vertex labels and 0-based cluster indices in "edges"; edges
// are optional and derived by build_junction_tree when absent.
//
// Model: {"vertices":[...], "trees":[{"clusters":..., "edges":...}, ...],
// "pair_copulas":[{"a":1,"b":3,"S":[2],"family":"gaussian","parameter":0.5}]}
// with one tree entry per level; tree 1 lists the singleton clusters.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cherryvine/graph.hpp"
#include "cherryvine/matrix.hpp"
#include "cherryvine/vine.hpp"

namespace cherryvine {

struct StructureFile {
  VertexSet vertices;
  std::vector<Hyperedge> clusters;
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> edges;
};

/// Parse failures and schema violations throw InputError; JSON syntax errors
/// report line and column.
StructureFile parse_structure(std::istream& in);
StructureFile read_structure(const std::filesystem::path& path);

/// Junction tree of a structure file: the given edges, or a derived tree.
/// Throws DomainError when the clusters do not form a junction tree.
JunctionTree to_junction_tree(const StructureFile& file);

void write_structure(std::ostream& out, const JunctionTree& tree);

VineModel parse_model(std::istream& in);
VineModel read_model(const std::filesystem::path& path);
void write_model(std::ostream& out, const VineModel& model);

struct CsvTable {
  std::vector<std::string> header;
  PointMatrix values;
};

/// Numeric CSV with a header row. Throws InputError naming the row and
/// column of the first malformed cell; rows are numbered from 1 after the
/// header.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes `header` and then one line per row, 17 significant digits.
void write_csv(std::ostream& out, const std::vector<std::string>& header, const PointMatrix& values);

/// Writes text to a file, replacing it. Throws InputError when the file
/// cannot be opened.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cherryvine
