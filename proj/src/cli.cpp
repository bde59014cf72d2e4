#include "extgraph/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "extgraph/error.hpp"
#include "extgraph/graphsel.hpp"
#include "extgraph/io.hpp"
#include "extgraph/measures.hpp"
#include "extgraph/parallel.hpp"
#include "extgraph/rng.hpp"
#include "extgraph/scmevm.hpp"
#include "extgraph/simulate.hpp"
#include "extgraph/studies.hpp"
#include "extgraph/synthgen.hpp"

namespace extgraph {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw Error(ErrorKind::InvalidArgument, what + ": not a number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string out_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + dir + "'");
}

Json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::vector<std::string> default_ids(std::size_t d) {
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < d; ++j) ids.push_back("X" + std::to_string(j + 1));
  return ids;
}

Graph named_graph(const std::string& name, std::size_t d) {
  if (name == "five") return five_node_graph();
  if (name == "sixteen") return sixteen_node_graph();
  if (name == "empty") return Graph(d);
  if (name == "complete") return Graph::complete(d);
  return graph_from_json(read_json_file(name));
}

FitMethod parse_method(const std::string& s) {
  if (s == "one") return FitMethod::OneStep;
  if (s == "two") return FitMethod::TwoStep;
  if (s == "three") return FitMethod::ThreeStep;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + s + "' (one|two|three)");
}

LaplaceMatrix laplace_data(const CsvTable& t, double marginal_quantile, std::vector<MarginalModel>* margins_out) {
  std::vector<MarginalModel> margins;
  for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
    const Vector col = t.values.col(j);
    margins.push_back(fit_marginal(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                   marginal_quantile));
  }
  LaplaceMatrix y = to_laplace_matrix(t.values, margins, t.column_ids);
  if (margins_out) *margins_out = std::move(margins);
  return y;
}

Json selection_json(const GraphSelectionReport& rep) {
  Json per = Json::array();
  for (const auto& r : rep.per_rho)
    per.push_back({{"rho", r.rho}, {"weighted", weighted_graph_to_json(r.weighted)},
                   {"pruned", graph_to_json(r.pruned)}});
  return {{"rho_grid", rep.rho_grid}, {"per_rho", per}, {"final", graph_to_json(rep.final_graph)},
          {"site_errors", rep.site_errors}, {"sites_ok", rep.sites_ok}};
}

void write_selection(const std::string& dir, const GraphSelectionReport& rep) {
  for (std::size_t k = 0; k < rep.per_rho.size(); ++k) {
    std::string csv = "j,k,weight\n";
    for (const auto& [e, w] : rep.per_rho[k].weighted.weights)
      csv += std::to_string(e.first + 1) + "," + std::to_string(e.second + 1) + "," + format_double(w) + "\n";
    write_text_file(out_path(dir, "weighted_rho_" + std::to_string(k + 1) + ".csv"), csv);
  }
  write_json_file(out_path(dir, "graph.json"), graph_to_json(rep.final_graph));
  write_json_file(out_path(dir, "selection_report.json"), selection_json(rep));
}

// ---- gen ----
struct GenArgs {
  std::string kind = "gaussian";
  std::string graph = "five";
  std::size_t d = 5;
  std::size_t n = 1000;
  double partial_lo = 0.1;
  double partial_hi = 0.4;
  std::string out_dir = ".";
};

int cmd_gen(const GenArgs& a, std::uint64_t seed, std::ostream& out) {
  ensure_dir(a.out_dir);
  const Graph g = named_graph(a.graph, a.d);
  const std::size_t d = g.n_nodes();
  const PartialRange pr{a.partial_lo, a.partial_hi};
  Json truth = {{"kind", a.kind}, {"seed", seed}, {"graph", graph_to_json(g)}, {"n", a.n}};
  if (a.kind == "scmevm") {
    const ScmevmTruth t = draw_params(d, g, derive_seed(seed, 0), pr);
    const auto samples = gen_scmevm(t, a.n, derive_seed(seed, 1));
    for (std::size_t i = 0; i < d; ++i)
      write_csv(out_path(a.out_dir, "site_" + std::to_string(i + 1) + ".csv"), default_ids(d), samples[i]);
    Json agg = Json::array();
    for (const auto& p : t.agg) agg.push_back(agg_to_json(p));
    truth.update({{"alpha", vec_json(t.alpha)}, {"beta", vec_json(t.beta)}, {"agg", agg},
                  {"precision", matrix_to_json(t.precision)}, {"threshold", kDefaultGenThreshold}});
  } else if (a.kind == "gaussian" || a.kind == "laplace" || a.kind == "studentt" || a.kind == "comonotone") {
    EllipticalKind k = EllipticalKind::Gaussian;
    if (a.kind == "laplace") k = EllipticalKind::Laplace;
    if (a.kind == "studentt") k = EllipticalKind::StudentT;
    const EllipticalTruth t = draw_elliptical(k, g, derive_seed(seed, 0), pr);
    Matrix x = gen_elliptical(t, a.n, derive_seed(seed, 1));
    if (a.kind == "comonotone")
      for (Eigen::Index j = 1; j < x.cols(); ++j) x.col(j) = x.col(0);
    write_csv(out_path(a.out_dir, "data.csv"), default_ids(d), x);
    truth.update({{"mean", vec_json(t.mean)}, {"correlation", matrix_to_json(t.correlation)},
                  {"precision", matrix_to_json(t.precision)}});
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "unknown generator kind '" + a.kind + "' (scmevm|gaussian|laplace|studentt|comonotone)");
  }
  write_json_file(out_path(a.out_dir, "truth.json"), truth);
  out << "wrote " << a.kind << " data (d=" << d << ", n=" << a.n << ") to " << a.out_dir << "\n";
  return kExitOk;
}

// ---- fit ----
struct FitArgs {
  std::string input;
  double marginal_quantile = 0.95;
  double dependence_quantile = 0.80;
  std::string site_quantiles;
  std::string structure = "saturated";
  std::string method = "three";
  std::string rho_grid;
  double selection_quantile = 0.70;
  std::string out_dir = ".";
};

int cmd_fit(const FitArgs& a, std::uint64_t seed, std::ostream& out) {
  const CsvTable t = read_csv(a.input);
  ensure_dir(a.out_dir);
  FitConfig cfg;
  cfg.marginal_quantile = a.marginal_quantile;
  cfg.dependence_quantile = a.dependence_quantile;
  cfg.site_quantiles = parse_list(a.site_quantiles, "site-quantiles");
  cfg.method = parse_method(a.method);
  cfg.seed = seed;
  std::vector<MarginalModel> margins;
  const LaplaceMatrix y = laplace_data(t, a.marginal_quantile, &margins);
  const std::size_t d = margins.size();
  bool warn = false;
  if (a.structure == "independent") {
    cfg.structure = Structure::independent();
  } else if (a.structure == "saturated") {
    cfg.structure = Structure::saturated();
  } else if (a.structure.rfind("graphical:", 0) == 0) {
    cfg.structure = Structure::graphical(graph_from_json(read_json_file(a.structure.substr(10))));
  } else if (a.structure == "select") {
    std::vector<double> grid = a.rho_grid.empty() ? default_rho_grid() : parse_list(a.rho_grid, "rho-grid");
    SelectOptions so;
    so.seed = derive_seed(seed, 99);
    const GraphSelectionReport rep = select_graph(y.values, {laplace_quantile(a.selection_quantile)}, grid, so);
    write_selection(a.out_dir, rep);
    if (rep.sites_ok < d) warn = true;
    cfg.structure = Structure::graphical(rep.final_graph);
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "unknown structure '" + a.structure + "' (independent|saturated|graphical:<path>|select)");
  }
  const ScmevmModel model = fit_model_laplace(y, margins, cfg);
  save_model(out_path(a.out_dir, "model.json"), model);

  std::string conv = "site,ok,converged,iterations,n_excesses,loglik,at_bound,copula_clamped,error\n";
  for (const auto& f : model.fits) {
    conv += std::to_string(f.site + 1) + "," + (f.ok ? "1" : "0") + "," + (f.converged ? "1" : "0") + "," +
            std::to_string(f.iterations) + "," + std::to_string(f.n_excesses) + "," + format_double(f.loglik) +
            "," + (f.at_bound ? "1" : "0") + "," + (f.copula_clamped ? "1" : "0") + ",\"" + f.error + "\"\n";
    if (!f.ok || !f.converged) warn = true;
  }
  write_text_file(out_path(a.out_dir, "convergence.csv"), conv);

  // Gaussian-scale residual QQ data: sorted scores against normal quantiles.
  for (const auto& f : model.fits) {
    if (!f.ok) continue;
    const Matrix z = residuals(y.values, f.site, f.threshold, f.dep);
    const auto others = other_sites(d, f.site);
    std::string qq = "variable,theoretical,empirical\n";
    const double n1 = static_cast<double>(z.rows()) + 1.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      std::vector<double> w(static_cast<std::size_t>(z.rows()));
      for (Eigen::Index r = 0; r < z.rows(); ++r)
        w[static_cast<std::size_t>(r)] = agg_gaussian_score(z(r, j), f.residual.margins[static_cast<std::size_t>(j)]);
      std::sort(w.begin(), w.end());
      for (std::size_t r = 0; r < w.size(); ++r)
        qq += std::to_string(others[static_cast<std::size_t>(j)] + 1) + "," +
              format_double(normal_quantile(static_cast<double>(r + 1) / n1)) + "," + format_double(w[r]) + "\n";
    }
    write_text_file(out_path(a.out_dir, "qq_site_" + std::to_string(f.site + 1) + ".csv"), qq);
  }

  Json side = {{"command", "fit"},
               {"seed", seed},
               {"input", a.input},
               {"marginal_quantile", a.marginal_quantile},
               {"dependence_quantile", a.dependence_quantile},
               {"site_quantiles", cfg.site_quantiles},
               {"structure", structure_to_json(cfg.structure)},
               {"method", a.method},
               {"partial", model.partial}};
  write_json_file(out_path(a.out_dir, "fit_sidecar.json"), side);
  out << "fitted " << d << " conditional models" << (warn ? " (with warnings)" : "") << "\n";
  return warn ? kExitPartial : kExitOk;
}

// ---- select-graph ----
struct SelectArgs {
  std::string input;
  double marginal_quantile = 0.95;
  double threshold_quantile = 0.70;
  std::string rho_grid;
  std::string out_dir = ".";
};

int cmd_select(const SelectArgs& a, std::uint64_t seed, std::ostream& out) {
  const CsvTable t = read_csv(a.input);
  ensure_dir(a.out_dir);
  const LaplaceMatrix y = laplace_data(t, a.marginal_quantile, nullptr);
  const std::vector<double> grid = a.rho_grid.empty() ? default_rho_grid() : parse_list(a.rho_grid, "rho-grid");
  SelectOptions so;
  so.seed = seed;
  const GraphSelectionReport rep = select_graph(y.values, {laplace_quantile(a.threshold_quantile)}, grid, so);
  write_selection(a.out_dir, rep);
  out << "selected graph with " << rep.final_graph.edge_count() << " edges over " << grid.size()
      << " penalties\n";
  return rep.sites_ok < static_cast<std::size_t>(y.values.cols()) ? kExitPartial : kExitOk;
}

// ---- simulate ----
struct SimArgs {
  std::string model;
  std::size_t n = 1000;
  double oversample = 20.0;
  double u_quantile = 0.0;
  std::string mode = "tail";
  std::string out_dir = ".";
};

int cmd_simulate(const SimArgs& a, std::uint64_t seed, std::ostream& out) {
  const ScmevmModel model = load_model(a.model);
  ensure_dir(a.out_dir);
  SimulationConfig cfg;
  cfg.n_out = a.n;
  cfg.oversample = a.oversample;
  cfg.seed = seed;
  double umax = 0.0;
  for (const auto& f : model.fits) umax = std::max(umax, f.threshold);
  cfg.u = a.u_quantile > 0.0 ? laplace_quantile(a.u_quantile) : umax;
  SimulatedSample s;
  if (a.mode == "tail") s = simulate_tail(model, cfg);
  else if (a.mode == "unconditional") s = simulate_unconditional(model, cfg, model.laplace_data);
  else throw Error(ErrorKind::InvalidArgument, "unknown mode '" + a.mode + "' (tail|unconditional)");
  std::vector<std::string> ids = model.laplace_data.column_ids;
  if (ids.size() != model.dim()) ids = default_ids(model.dim());
  write_csv(out_path(a.out_dir, "samples.csv"), ids, s.rows);
  write_csv(out_path(a.out_dir, "samples_laplace.csv"), ids, s.laplace_rows);
  Json side = {{"command", "simulate"}, {"seed", seed},          {"mode", a.mode},
               {"u", cfg.u},            {"n_out", cfg.n_out},   {"oversample", cfg.oversample},
               {"n_proposals", s.n_proposals}, {"p_hat", s.p_hat},
               {"effective_sample_size", s.effective_sample_size},
               {"degenerate_weights", s.degenerate_weights}};
  write_json_file(out_path(a.out_dir, "simulate_sidecar.json"), side);
  out << "simulated " << a.n << " rows (effective sample size " << format_double(s.effective_sample_size) << ")\n";
  if (s.degenerate_weights) out << "warning: importance weights are degenerate\n";
  return s.degenerate_weights ? kExitPartial : kExitOk;
}

// ---- measure / bootstrap ----
struct MeasureArgs {
  std::string input;
  std::string measure = "both";
  std::string u_grid = "0.8,0.85,0.9,0.95";
  std::size_t n_boot = 200;
  std::string out_dir = ".";
};

int cmd_measure(const MeasureArgs& a, bool bootstrap, std::uint64_t seed, std::ostream& out) {
  const CsvTable t = read_csv(a.input);
  ensure_dir(a.out_dir);
  const std::vector<double> grid = parse_list(a.u_grid, "u-grid");
  std::vector<std::pair<std::string, CurveEstimator>> ests;
  if (a.measure == "chi" || a.measure == "both") ests.emplace_back("chi", chi_estimator);
  if (a.measure == "eta" || a.measure == "both") ests.emplace_back("eta", eta_estimator);
  if (ests.empty()) throw Error(ErrorKind::InvalidArgument, "unknown measure '" + a.measure + "' (chi|eta|both)");
  const auto d = t.values.cols();
  std::string csv = "j,k,measure,u,estimate,stderr\n";
  std::size_t pair_index = 0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = j + 1; k < d; ++k, ++pair_index) {
      Matrix pair(t.values.rows(), 2);
      pair.col(0) = t.values.col(j);
      pair.col(1) = t.values.col(k);
      for (std::size_t e = 0; e < ests.size(); ++e) {
        DependenceCurve c;
        if (bootstrap) {
          c = bootstrap_curves(pair, ests[e].second, grid, a.n_boot, derive_seed(seed, pair_index, e));
        } else {
          c.u_grid = grid;
          for (double u : grid) {
            double v = std::numeric_limits<double>::quiet_NaN();
            try {
              v = ests[e].second(pair, u);
            } catch (const Error&) {
            }
            c.values.push_back(v);
            c.stderr_values.push_back(0.0);
          }
        }
        for (std::size_t g = 0; g < grid.size(); ++g)
          csv += std::to_string(j + 1) + "," + std::to_string(k + 1) + "," + ests[e].first + "," +
                 format_double(grid[g]) + "," + format_double(c.values[g]) + "," +
                 format_double(c.stderr_values[g]) + "\n";
      }
    }
  const std::string name = bootstrap ? "bootstrap.csv" : "measure.csv";
  write_text_file(out_path(a.out_dir, name), csv);
  Json side = {{"command", bootstrap ? "bootstrap" : "measure"}, {"seed", seed}, {"input", a.input},
               {"measure", a.measure}, {"u_grid", grid}};
  if (bootstrap) side["n_boot"] = a.n_boot;
  write_json_file(out_path(a.out_dir, bootstrap ? "bootstrap_sidecar.json" : "measure_sidecar.json"), side);
  out << "wrote " << name << "\n";
  return kExitOk;
}

// ---- reproduce ----
struct ReproduceArgs {
  std::string study;
  std::size_t reps = 0;
  std::string out_dir = ".";
};

int cmd_reproduce(const ReproduceArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const auto known = known_studies();
  if (std::find(known.begin(), known.end(), a.study) == known.end()) {
    err << Json{{"kind", "InvalidArgument"}, {"message", "unknown study '" + a.study + "'"}, {"known", known}}.dump()
        << "\n";
    return kExitError;
  }
  ensure_dir(a.out_dir);
  out << run_named_study(a.study, a.out_dir, a.reps, seed) << "\n";
  return kExitOk;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message, std::size_t line) {
  Json j = {{"kind", kind}, {"message", message}};
  if (line > 0) j["line"] = line;
  err << j.dump() << "\n";
}

}  // namespace

std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "config: expected key=value", lineno);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw Error(ErrorKind::Parse, "config: empty key", lineno);
    std::replace(key.begin(), key.end(), '_', '-');
    kv[key] = value;
  }
  return kv;
}

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  // Config-file values become flags unless the same flag was given explicitly.
  std::vector<std::string> args = args_in;
  try {
    for (std::size_t k = 0; k < args_in.size(); ++k) {
      std::string path;
      if (args_in[k] == "--config" && k + 1 < args_in.size()) path = args_in[k + 1];
      else if (args_in[k].rfind("--config=", 0) == 0) path = args_in[k].substr(9);
      if (path.empty()) continue;
      const auto kv = parse_config(read_text_file(path));
      for (const auto& [key, value] : kv) {
        const std::string flag = "--" + key;
        const bool given = std::any_of(args_in.begin(), args_in.end(), [&](const std::string& s) {
          return s == flag || s.rfind(flag + "=", 0) == 0;
        });
        if (!given) args.push_back(flag + "=" + value);
      }
    }
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what(), e.line());
    return kExitError;
  }

  CLI::App app{"Structured conditional extremes on graphs"};
  app.require_subcommand(1);
  std::string config_path;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "key=value config file; flags take precedence");
  app.add_option("--threads", threads, "worker threads (0 = logical cores)");
  app.add_option("--seed", seed, "root seed");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "generate synthetic data");
  gen->add_option("--kind", ga.kind, "scmevm|gaussian|laplace|studentt|comonotone");
  gen->add_option("--graph", ga.graph, "five|sixteen|empty|complete|<graph.json>");
  gen->add_option("--d", ga.d, "dimension for empty/complete graphs");
  gen->add_option("--n", ga.n, "rows (per site for scmevm)");
  gen->add_option("--partial-lo", ga.partial_lo);
  gen->add_option("--partial-hi", ga.partial_hi);
  gen->add_option("--out-dir", ga.out_dir);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit the conditional model");
  fit->add_option("--input", fa.input)->required();
  fit->add_option("--marginal-quantile", fa.marginal_quantile);
  fit->add_option("--dependence-quantile", fa.dependence_quantile);
  fit->add_option("--site-quantiles", fa.site_quantiles, "comma-separated per-site quantiles");
  fit->add_option("--structure", fa.structure, "independent|saturated|graphical:<path>|select");
  fit->add_option("--method", fa.method, "one|two|three");
  fit->add_option("--rho-grid", fa.rho_grid, "comma-separated penalties for structure=select");
  fit->add_option("--selection-quantile", fa.selection_quantile);
  fit->add_option("--out-dir", fa.out_dir);

  SelectArgs sa;
  auto* sel = app.add_subcommand("select-graph", "select the residual graph");
  sel->add_option("--input", sa.input)->required();
  sel->add_option("--marginal-quantile", sa.marginal_quantile);
  sel->add_option("--threshold-quantile", sa.threshold_quantile);
  sel->add_option("--rho-grid", sa.rho_grid);
  sel->add_option("--out-dir", sa.out_dir);

  SimArgs ma;
  auto* sim = app.add_subcommand("simulate", "simulate from a fitted model");
  sim->add_option("--model", ma.model)->required();
  sim->add_option("--n", ma.n);
  sim->add_option("--oversample", ma.oversample);
  sim->add_option("--u-quantile", ma.u_quantile, "Laplace quantile of the common threshold");
  sim->add_option("--mode", ma.mode, "tail|unconditional");
  sim->add_option("--out-dir", ma.out_dir);

  MeasureArgs mea;
  auto* mes = app.add_subcommand("measure", "empirical chi and eta curves");
  MeasureArgs boa;
  auto* boo = app.add_subcommand("bootstrap", "bootstrap chi and eta curves");
  for (auto [cmd, m] : {std::pair{mes, &mea}, std::pair{boo, &boa}}) {
    cmd->add_option("--input", m->input)->required();
    cmd->add_option("--measure", m->measure, "chi|eta|both");
    cmd->add_option("--u-grid", m->u_grid);
    cmd->add_option("--out-dir", m->out_dir);
  }
  boo->add_option("--n-boot", boa.n_boot);

  ReproduceArgs ra;
  auto* rep = app.add_subcommand("reproduce", "run a named study");
  rep->add_option("--study", ra.study)->required();
  rep->add_option("--reps", ra.reps, "replicates (0 = study default)");
  rep->add_option("--out-dir", ra.out_dir);

  for (auto* sc : app.get_subcommands({})) sc->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "InvalidArgument", e.what(), 0);
    return kExitError;
  }

  thread_count_setting().store(threads);
  try {
    if (*gen) return cmd_gen(ga, seed, out);
    if (*fit) return cmd_fit(fa, seed, out);
    if (*sel) return cmd_select(sa, seed, out);
    if (*sim) return cmd_simulate(ma, seed, out);
    if (*mes) return cmd_measure(mea, false, seed, out);
    if (*boo) return cmd_measure(boa, true, seed, out);
    if (*rep) return cmd_reproduce(ra, seed, out, err);
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what(), e.line());
    return kExitError;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what(), 0);
    return kExitError;
  }
  return kExitError;
}

}  // namespace extgraph
