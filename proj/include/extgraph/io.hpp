#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "extgraph/gaussgraph.hpp"
#include "extgraph/margins.hpp"
#include "extgraph/scmevm.hpp"

namespace extgraph {

using Json = nlohmann::json;

inline constexpr const char* kModelSchema = "scmevm-v1";

struct CsvTable {
  std::vector<std::string> column_ids;
  Matrix values;
};

// First line holds column ids; every later line holds one real per column.
// Parse errors carry the 1-based line number.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

// %.17g formatting.
std::string format_double(double v);
std::string csv_string(const std::vector<std::string>& column_ids, const Matrix& values);
void write_csv(const std::string& path, const std::vector<std::string>& column_ids,
               const Matrix& values);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Graph JSON: {"d": n, "edges": [[j, k], ...]} with 1-based j < k.
Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);
// Weighted: {"d": n, "edges": [{"edge": [j, k], "weight": w}, ...]}.
Json weighted_graph_to_json(const WeightedGraph& g);

Json agg_to_json(const AggParams& p);
AggParams agg_from_json(const Json& j);

// {"dim": n, "data": [row-major]} (rows x cols adds "cols" when not square).
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json margin_to_json(const MarginalModel& m);
MarginalModel margin_from_json(const Json& j);

Json structure_to_json(const Structure& s);
Structure structure_from_json(const Json& j);

Json fit_to_json(const ConditionalFit& f);
ConditionalFit fit_from_json(const Json& j);

Json model_to_json(const ScmevmModel& m);
ScmevmModel model_from_json(const Json& j);

void save_model(const std::string& path, const ScmevmModel& m);
ScmevmModel load_model(const std::string& path);

}  // namespace extgraph
