#include "extgraph/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "extgraph/error.hpp"

namespace extgraph {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

Json vec_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

Vector vec_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return v;
}

FitMethod method_from_string(const std::string& s) {
  if (s == "one") return FitMethod::OneStep;
  if (s == "two") return FitMethod::TwoStep;
  if (s == "three") return FitMethod::ThreeStep;
  throw Error(ErrorKind::Parse, "unknown fit method '" + s + "'");
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "empty input: missing header", 1);
  ++lineno;
  t.column_ids = split_fields(line);
  std::set<std::string> seen;
  for (const auto& id : t.column_ids) {
    if (id.empty()) throw Error(ErrorKind::Parse, "header has an empty column id", 1);
    char* end = nullptr;
    std::strtod(id.c_str(), &end);
    if (end != id.c_str() && *end == '\0')
      throw Error(ErrorKind::Parse, "header field '" + id + "' is numeric; first row must hold ids", 1);
    if (!seen.insert(id).second) throw Error(ErrorKind::Parse, "duplicate column id '" + id + "'", 1);
  }
  const std::size_t d = t.column_ids.size();
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != d)
      throw Error(ErrorKind::Parse,
                  "expected " + std::to_string(d) + " fields, found " + std::to_string(fields.size()),
                  lineno);
    for (const auto& f : fields) {
      if (f.empty()) throw Error(ErrorKind::Parse, "missing value", lineno);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0' || !std::isfinite(v))
        throw Error(ErrorKind::Parse, "not a finite number: '" + f + "'", lineno);
      data.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorKind::Parse, "no data rows", lineno + 1);
  t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < d; ++c)
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * d + c];
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return parse_csv(in);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_string(const std::vector<std::string>& column_ids, const Matrix& values) {
  std::string out;
  for (std::size_t c = 0; c < column_ids.size(); ++c) {
    if (c) out += ',';
    out += column_ids[c];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += format_double(values(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& column_ids,
               const Matrix& values) {
  write_text_file(path, csv_string(column_ids, values));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Parse, "invalid JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (const auto& [j, k] : g.edges()) edges.push_back({j + 1, k + 1});
  return {{"d", g.n_nodes()}, {"edges", edges}};
}

Graph graph_from_json(const Json& j) {
  try {
    Graph g(j.at("d").get<std::size_t>());
    for (const auto& e : j.at("edges")) {
      const auto a = e.at(0).get<long long>();
      const auto b = e.at(1).get<long long>();
      require(a >= 1 && b >= 1, ErrorKind::InvalidNode, "graph JSON: node indices are 1-based");
      g.add_edge(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
    }
    return g;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("graph JSON: ") + e.what());
  }
}

Json weighted_graph_to_json(const WeightedGraph& g) {
  Json edges = Json::array();
  for (const auto& [e, w] : g.weights)
    edges.push_back({{"edge", {e.first + 1, e.second + 1}}, {"weight", w}});
  return {{"d", g.n_nodes}, {"edges", edges}};
}

Json agg_to_json(const AggParams& p) {
  return {{"nu", p.nu}, {"kappa1", p.kappa1}, {"kappa2", p.kappa2}, {"delta", p.delta}};
}

AggParams agg_from_json(const Json& j) {
  return {j.at("nu").get<double>(), j.at("kappa1").get<double>(), j.at("kappa2").get<double>(),
          j.at("delta").get<double>()};
}

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  Json j = {{"dim", m.rows()}, {"data", data}};
  if (m.rows() != m.cols()) j["cols"] = m.cols();
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("dim").get<Eigen::Index>();
  const auto cols = j.contains("cols") ? j.at("cols").get<Eigen::Index>() : rows;
  const Json& data = j.at("data");
  require(static_cast<Eigen::Index>(data.size()) == rows * cols, ErrorKind::Parse,
          "matrix JSON: data length does not match its dimension");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = data[static_cast<std::size_t>(r * cols + c)].get<double>();
  return m;
}

Json margin_to_json(const MarginalModel& m) {
  return {{"threshold", m.gpd_threshold()}, {"scale", m.gpd_scale()},   {"shape", m.gpd_shape()},
          {"tail_prob", m.tail_prob()},     {"sample_quantiles", m.sorted_sample()}};
}

MarginalModel margin_from_json(const Json& j) {
  return MarginalModel(j.at("sample_quantiles").get<std::vector<double>>(), j.at("threshold").get<double>(),
                       j.at("scale").get<double>(), j.at("shape").get<double>(),
                       j.at("tail_prob").get<double>());
}

Json structure_to_json(const Structure& s) {
  switch (s.kind) {
    case StructureKind::Independent: return {{"kind", "independent"}};
    case StructureKind::Saturated: return {{"kind", "saturated"}};
    case StructureKind::Graphical: return {{"kind", "graphical"}, {"graph", graph_to_json(s.graph)}};
  }
  return {};
}

Structure structure_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "independent") return Structure::independent();
  if (kind == "saturated") return Structure::saturated();
  if (kind == "graphical") return Structure::graphical(graph_from_json(j.at("graph")));
  throw Error(ErrorKind::Parse, "unknown structure kind '" + kind + "'");
}

Json fit_to_json(const ConditionalFit& f) {
  Json j = {{"site", f.site + 1}, {"ok", f.ok}, {"method", to_string(f.method)}};
  if (!f.ok) {
    j["error"] = f.error;
    return j;
  }
  Json margins = Json::array();
  for (const auto& m : f.residual.margins) margins.push_back(agg_to_json(m));
  j.update({{"threshold", f.threshold},
            {"n_excesses", f.n_excesses},
            {"loglik", f.loglik},
            {"converged", f.converged},
            {"iterations", f.iterations},
            {"copula_clamped", f.copula_clamped},
            {"at_bound", f.at_bound},
            {"alpha", vec_to_json(f.dep.alpha)},
            {"beta", vec_to_json(f.dep.beta)},
            {"working_mu", vec_to_json(f.dep.working_mu)},
            {"working_sigma", vec_to_json(f.dep.working_sigma)},
            {"beta_unidentified", f.dep.beta_unidentified},
            {"residual", {{"margins", margins}, {"precision", matrix_to_json(f.residual.precision)}}}});
  return j;
}

ConditionalFit fit_from_json(const Json& j) {
  ConditionalFit f;
  f.site = j.at("site").get<std::size_t>() - 1;
  f.ok = j.at("ok").get<bool>();
  f.method = method_from_string(j.at("method").get<std::string>());
  if (!f.ok) {
    f.converged = false;
    f.error = j.value("error", "");
    return f;
  }
  f.threshold = j.at("threshold").get<double>();
  f.n_excesses = j.at("n_excesses").get<std::size_t>();
  f.loglik = j.at("loglik").get<double>();
  f.converged = j.at("converged").get<bool>();
  f.iterations = j.at("iterations").get<int>();
  f.copula_clamped = j.at("copula_clamped").get<bool>();
  f.at_bound = j.at("at_bound").get<bool>();
  f.dep.alpha = vec_from_json(j.at("alpha"));
  f.dep.beta = vec_from_json(j.at("beta"));
  f.dep.working_mu = vec_from_json(j.at("working_mu"));
  f.dep.working_sigma = vec_from_json(j.at("working_sigma"));
  f.dep.beta_unidentified = j.at("beta_unidentified").get<std::vector<bool>>();
  for (const auto& m : j.at("residual").at("margins")) f.residual.margins.push_back(agg_from_json(m));
  f.residual.precision = matrix_from_json(j.at("residual").at("precision"));
  return f;
}

Json model_to_json(const ScmevmModel& m) {
  Json margins = Json::array();
  for (const auto& mm : m.margins) margins.push_back(margin_to_json(mm));
  Json fits = Json::array();
  for (const auto& f : m.fits) fits.push_back(fit_to_json(f));
  return {{"schema", kModelSchema},
          {"d", m.dim()},
          {"column_ids", m.laplace_data.column_ids},
          {"partial", m.partial},
          {"structure", structure_to_json(m.structure)},
          {"margins", margins},
          {"fits", fits},
          {"laplace_data", matrix_to_json(m.laplace_data.values)}};
}

ScmevmModel model_from_json(const Json& j) {
  try {
    const std::string schema = j.at("schema").get<std::string>();
    require(schema == kModelSchema, ErrorKind::Parse, "unsupported model schema '" + schema + "'");
    ScmevmModel m;
    m.partial = j.at("partial").get<bool>();
    m.structure = structure_from_json(j.at("structure"));
    for (const auto& mm : j.at("margins")) m.margins.push_back(margin_from_json(mm));
    for (const auto& f : j.at("fits")) m.fits.push_back(fit_from_json(f));
    m.laplace_data.column_ids = j.at("column_ids").get<std::vector<std::string>>();
    m.laplace_data.values = matrix_from_json(j.at("laplace_data"));
    require(m.fits.size() == m.margins.size() && j.at("d").get<std::size_t>() == m.margins.size(),
            ErrorKind::Parse, "model JSON: inconsistent dimension");
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model JSON: ") + e.what());
  }
}

void save_model(const std::string& path, const ScmevmModel& m) { write_json_file(path, model_to_json(m)); }

ScmevmModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace extgraph
