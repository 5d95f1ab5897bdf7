#include "cli.hpp"

#include "cssdpp/bounds.hpp"
#include "cssdpp/datasets.hpp"
#include "cssdpp/error.hpp"
#include "cssdpp/linalg.hpp"
#include "cssdpp/matrixgen.hpp"
#include "cssdpp/oracle.hpp"
#include "cssdpp/parallel.hpp"
#include "cssdpp/regression.hpp"
#include "cssdpp/samplers.hpp"
#include "cssdpp/subsets.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace cssdpp::cli {

namespace {

using nlohmann::json;

// Stream identifiers, so that every consumer of randomness has its own
// sequence regardless of which other commands or algorithms run.
constexpr std::uint64_t kProfileStream = 1;
constexpr std::uint64_t kMatrixStream = 2;
constexpr std::uint64_t kWeightStream = 3;
constexpr std::uint64_t kRepStream = 1000;
constexpr std::uint64_t kBoostStream = 2000;
constexpr std::uint64_t kRiskStream = 3000;
constexpr std::uint64_t kOlsStream = 4000;

struct Options {
  std::string dataset;
  std::string toy;
  Index k = 0;
  std::vector<std::string> algos{"dpp"};
  Index reps = 50;
  Index boost_rounds = 0;
  Index boost_batch = 50;
  std::uint64_t seed = 0;
  double theta = 2.0;
  Index c = 0;
  Index s = 0;
  std::optional<double> threshold;
  std::string out;
  std::string format = "json";
  bool standardize = false;
  bool header = false;
  Index p = 0;
  Index n_rows = 100;
  std::string ell;
  double noise_var = 1.0;
  bool timings = false;
};

struct Dataset {
  std::string id;
  DataMatrix X;
  Index k = 0;
  json meta;
};

json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    a.push_back(v(i));
  }
  return a;
}

json to_json(std::span<const Index> v) {
  json a = json::array();
  for (Index i : v) {
    a.push_back(i);
  }
  return a;
}

Vector read_vector_file(const std::string& path) {
  const Matrix M = read_csv_file(path);
  return Eigen::Map<const Vector>(M.data(), M.size());
}

Index resolve_k(const Options& o, Index fallback) {
  const Index k = o.k > 0 ? o.k : fallback;
  if (k < 1) {
    throw InputError("--k is required for this dataset");
  }
  return k;
}

Dataset load_dataset(const Options& o) {
  if (!o.dataset.empty() && !o.toy.empty()) {
    throw InputError("give either --dataset or --toy, not both");
  }
  if (!o.dataset.empty()) {
    Matrix values = read_csv_file(o.dataset, o.header);
    if (o.standardize) {
      values = standardize_columns(values);
    }
    Dataset ds{std::filesystem::path(o.dataset).stem().string(), DataMatrix(std::move(values)),
               resolve_k(o, 0), json::object()};
    ds.meta["source"] = o.dataset;
    return ds;
  }
  if (o.toy.empty()) {
    throw InputError("a dataset is required: --dataset <csv> or --toy <name>");
  }
  const ToySpectrum spec = toy_spectrum(o.toy);
  const Index d = spec.sigma.size();
  const Index k = resolve_k(o, spec.k);
  if (k > d) {
    throw InputError("--k exceeds the number of columns");
  }
  Vector ell;
  Index p = d;
  if (!o.ell.empty()) {
    ell = read_vector_file(o.ell);
    if (ell.size() != d) {
      throw InputError("--ell must list one score per column");
    }
    p = (ell.array() >= kZeroLeverage).count();
  } else {
    p = o.p > 0 ? o.p : d;
    Rng rng(o.seed, kProfileStream);
    ell = dirichlet_leverage_profile(k, p, d, rng);
  }
  Rng rng(o.seed, kMatrixStream);
  GeneratedMatrix gen = matrix_generator(ell, spec.sigma, o.n_rows, rng);
  std::ostringstream id;
  id << spec.name << "-p" << p;
  Dataset ds{id.str(), std::move(gen.X), k, json::object()};
  ds.meta["source"] = spec.name;
  ds.meta["k"] = k;
  ds.meta["N"] = o.n_rows;
  ds.meta["d"] = d;
  ds.meta["p"] = p;
  ds.meta["seed"] = o.seed;
  ds.meta["sigma"] = to_json(spec.sigma);
  ds.meta["leverage"] = to_json(ell);
  ds.meta["beta"] = k < d ? flatness_beta(spec.sigma, k, d) : 1.0;
  return ds;
}

SelectorSpec make_spec(const Options& o, const std::string& name) {
  SelectorSpec spec;
  spec.kind = parse_selector(name);
  spec.draws = o.s;
  spec.c = o.c;
  spec.theta = o.theta;
  spec.threshold = o.threshold;
  return spec;
}

struct Residuals {
  double frobenius = 0.0;
  double spectral = 0.0;
};

// Selections with more than k distinct columns are compared through their
// best rank-k approximation, which keeps every selector above the PCA floor.
Residuals residuals(const ResidualEvaluator& eval, const SubsetSelection& S, Index k) {
  const std::vector<Index> cols = S.distinct();
  return {std::sqrt(eval.rank_k_residual_sq(cols, k, Norm::Frobenius)),
          std::sqrt(eval.rank_k_residual_sq(cols, k, Norm::Spectral))};
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out);
  if (!file) {
    throw InputError("cannot write '" + o.out + "'");
  }
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o, std::ostream& out) {
  if (o.toy.empty()) {
    throw InputError("gen needs --toy");
  }
  if (o.out.empty()) {
    throw InputError("gen needs --out for the matrix CSV");
  }
  const Dataset ds = load_dataset(o);
  write_csv_file(o.out, ds.X.values());
  std::filesystem::path sidecar(o.out);
  sidecar.replace_extension(".json");
  if (sidecar == std::filesystem::path(o.out)) {
    sidecar += ".json";
  }
  std::ofstream meta(sidecar);
  if (!meta) {
    throw InputError("cannot write '" + sidecar.string() + "'");
  }
  meta << dump(ds.meta);
  out << "wrote " << o.out << " and " << sidecar.string() << "\n";
  return 0;
}

int cmd_select(const Options& o, std::ostream& out) {
  const Dataset ds = load_dataset(o);
  const SvdBundle svd = compute_svd(ds.X);
  const SelectorSpec spec = make_spec(o, o.algos.front());
  Rng rng(o.seed, kRepStream + static_cast<std::uint64_t>(spec.kind));
  const auto start = std::chrono::steady_clock::now();
  const SubsetSelection S = select(spec, ds.X, svd, ds.k, rng);
  const double elapsed = seconds_since(start);
  const Residuals res = residuals(ResidualEvaluator(svd), S, ds.k);

  if (o.format == "csv") {
    std::ostringstream text;
    text << "column\n";
    for (Index j : S.indices()) {
      text << j << "\n";
    }
    emit(o, text.str(), out);
    return 0;
  }
  json j;
  j["dataset"] = ds.id;
  j["algorithm"] = std::string(selector_name(spec.kind));
  j["k"] = ds.k;
  j["seed"] = o.seed;
  j["selection"] = to_json(S.indices());
  j["frobenius_residual"] = res.frobenius;
  j["spectral_residual"] = res.spectral;
  j["pca_frobenius"] = best_rank_k_error(svd, ds.k, Norm::Frobenius);
  j["pca_spectral"] = best_rank_k_error(svd, ds.k, Norm::Spectral);
  if (o.timings) {
    j["wall_seconds"] = elapsed;
  }
  emit(o, dump(j), out);
  return 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
  if (o.reps < 1) {
    throw InputError("--reps must be at least 1");
  }
  if (o.boost_rounds < 0 || o.boost_batch < 1) {
    throw InputError("--boost-rounds must be >= 0 and --boost-batch >= 1");
  }
  const Dataset ds = load_dataset(o);
  const SvdBundle svd = compute_svd(ds.X);
  const ResidualEvaluator eval(svd);
  const Index k = ds.k;
  const double pca_fro = best_rank_k_error(svd, k, Norm::Frobenius);
  const double pca_spe = best_rank_k_error(svd, k, Norm::Spectral);

  json records = json::array();
  std::ostringstream csv;
  csv << std::setprecision(17) << "dataset,algorithm,k,seed,series,index,value\n";
  for (const std::string& name : o.algos) {
    const SelectorSpec spec = make_spec(o, name);
    const auto kind = static_cast<std::uint64_t>(spec.kind);
    const Rng base(o.seed, kRepStream + kind);
    std::vector<Residuals> reps(static_cast<std::size_t>(o.reps));
    std::vector<double> times(reps.size());
    parallel_tasks(reps.size(), [&](std::size_t r) {
      Rng rng = base.substream(r);
      const auto start = std::chrono::steady_clock::now();
      const SubsetSelection S = select(spec, ds.X, svd, k, rng);
      times[r] = seconds_since(start);
      reps[r] = residuals(eval, S, k);
    });

    // Boosting: each round keeps the best of a batch of draws.
    const Rng boost_base(o.seed, kBoostStream + kind);
    std::vector<double> boosted(static_cast<std::size_t>(o.boost_rounds));
    parallel_tasks(boosted.size(), [&](std::size_t b) {
      const Rng round = boost_base.substream(b);
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < o.boost_batch; ++i) {
        Rng rng = round.substream(static_cast<std::uint64_t>(i));
        best = std::min(best, residuals(eval, select(spec, ds.X, svd, k, rng), k).frobenius);
      }
      boosted[b] = best;
    });

    json rec;
    rec["dataset"] = ds.id;
    rec["algorithm"] = std::string(selector_name(spec.kind));
    rec["k"] = k;
    rec["seed"] = o.seed;
    json errors = json::array();
    json spectral = json::array();
    for (const Residuals& r : reps) {
      errors.push_back(r.frobenius);
      spectral.push_back(r.spectral);
    }
    rec["errors"] = errors;
    rec["spectral_errors"] = spectral;
    rec["boosted"] = boosted;
    rec["pca_frobenius"] = pca_fro;
    rec["pca_spectral"] = pca_spe;
    if (o.timings) {
      rec["wall_seconds"] = times;
    }
    records.push_back(rec);

    auto rows = [&](const char* series, const auto& values) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        csv << ds.id << ',' << rec["algorithm"].get<std::string>() << ',' << k << ',' << o.seed
            << ',' << series << ',' << i << ',' << values[i] << '\n';
      }
    };
    std::vector<double> fro(reps.size());
    std::vector<double> spe(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
      fro[i] = reps[i].frobenius;
      spe[i] = reps[i].spectral;
    }
    rows("errors", fro);
    rows("spectral_errors", spe);
    rows("boosted", boosted);
    if (o.timings) {
      rows("wall_seconds", times);
    }
  }
  emit(o, o.format == "csv" ? csv.str() : dump(records), out);
  return 0;
}

int cmd_bounds(const Options& o, std::ostream& out) {
  const Dataset ds = load_dataset(o);
  const SvdBundle svd = compute_svd(ds.X);
  const Index k = ds.k;
  const Index d = svd.n_cols();
  const std::vector<BoundReport> reports = bound_reports(svd, k, o.theta);
  const bool exact = binomial(d, k) <= kEnumerationCap;

  std::optional<SubsetLaw> dpp_law;
  std::optional<SubsetLaw> vs_law;
  std::optional<SubsetLaw> conditional_law;
  std::vector<double> errors_fro;
  std::vector<double> errors_spe;
  json avoiding = nullptr;
  if (exact) {
    dpp_law = enumerate_law(svd, k, LawKind::Dpp);
    vs_law = enumerate_law(svd, k, LawKind::VolumeSampling);
    const KLeverageProfile profile = k_leverage_scores(svd, k);
    conditional_law = condition_on_avoiding(*dpp_law, avoided_columns(profile, o.theta));
    errors_fro = subset_errors(svd, k, Norm::Frobenius);
    errors_spe = subset_errors(svd, k, Norm::Spectral);
    const AvoidingProbability paths =
        avoiding_probability_paths(svd.V.leftCols(k), profile, o.theta);
    avoiding = {{"probability", paths.enumerated},
                {"probability_spectral", paths.spectral},
                {"lower_bound", 1.0 / o.theta}};
  }

  json rows = json::array();
  std::ostringstream csv;
  csv << std::setprecision(17)
      << "dataset,selector,norm,bound_factor,reference_sq,bound_sq,exact_sq,ratio,violation\n";
  for (const BoundReport& r : reports) {
    json row;
    row["selector"] = r.selector;
    row["norm"] = std::string(to_string(r.norm));
    row["bound_factor"] = r.bound_factor;
    row["reference_sq"] = r.reference_sq;
    row["bound_sq"] = r.bound_value;
    row["bound_root"] = std::sqrt(r.bound_value);
    row["k"] = r.k;
    row["d"] = r.d;
    row["p"] = r.p;
    row["p_eff"] = r.p_eff;
    row["theta"] = r.theta;
    row["beta"] = r.beta;
    json exact_sq = nullptr;
    json ratio = nullptr;
    bool violation = false;
    if (exact) {
      const SubsetLaw& law = r.selector == "vs"                ? *vs_law
                             : r.selector == "dpp-conditional" ? *conditional_law
                                                               : *dpp_law;
      const double e = expectation(law, r.norm == Norm::Frobenius ? errors_fro : errors_spe);
      exact_sq = e;
      row["exact_root"] = std::sqrt(e);
      if (r.reference_sq > 0.0) {
        ratio = e / r.reference_sq;
      }
      violation = e > r.bound_value * (1.0 + 1e-9) + 1e-12;
    }
    row["exact_sq"] = exact_sq;
    row["ratio"] = ratio;
    row["violation"] = violation;
    rows.push_back(row);
    csv << ds.id << ',' << r.selector << ',' << to_string(r.norm) << ',' << r.bound_factor << ','
        << r.reference_sq << ',' << r.bound_value << ','
        << (exact_sq.is_null() ? std::string() : exact_sq.dump()) << ','
        << (ratio.is_null() ? std::string() : ratio.dump()) << ',' << (violation ? 1 : 0) << '\n';
  }
  json j;
  j["dataset"] = ds.id;
  j["k"] = k;
  j["theta"] = o.theta;
  j["seed"] = o.seed;
  j["exact"] = exact;
  j["avoiding_event"] = avoiding;
  j["bounds"] = rows;
  emit(o, o.format == "csv" ? csv.str() : dump(j), out);
  return 0;
}

int cmd_risk(const Options& o, std::ostream& out, Index trials) {
  const Dataset ds = load_dataset(o);
  const SvdBundle svd = compute_svd(ds.X);
  const Index k = ds.k;
  const Index d = svd.n_cols();

  Rng weight_rng(o.seed, kWeightStream);
  Vector w_star(d);
  for (Index i = 0; i < d; ++i) {
    w_star(i) = weight_rng.normal();
  }
  w_star.normalize();
  const RegressionProblem problem{ds.X, w_star, o.noise_var};
  const KLeverageProfile profile = k_leverage_scores(svd, k);

  RiskBoundParams params;
  params.k = k;
  params.p = profile.sparsity_p;
  params.p_eff = effective_sparsity(profile, o.theta);
  params.theta = o.theta;
  params.rank = svd.rank;
  params.n_rows = ds.X.n_rows();
  params.w_norm = w_star.norm();
  params.sigma_next = svd.singular_value(k);
  params.noise_var = o.noise_var;

  json j;
  j["dataset"] = ds.id;
  j["k"] = k;
  j["seed"] = o.seed;
  j["trials"] = trials;
  j["noise_variance"] = o.noise_var;
  j["bounds"] = {
      {"ols", excess_risk_bound(RiskBoundKind::Ols, params)},
      {"pcr", excess_risk_bound(RiskBoundKind::Pcr, params)},
      {"dpp", excess_risk_bound(RiskBoundKind::Dpp, params)},
      {"dpp_conditional", excess_risk_bound(RiskBoundKind::DppConditional, params)},
  };
  const RiskEstimate ols = ols_risk_mc(problem, trials, Rng(o.seed, kOlsStream));
  j["ols"] = {{"mean", ols.mean}, {"stderr", ols.std_error}};

  std::ostringstream csv;
  csv << std::setprecision(17) << "dataset,estimator,mean,stderr\n";
  csv << ds.id << ",ols," << ols.mean << ',' << ols.std_error << '\n';
  json estimates = json::array();
  for (const std::string& name : o.algos) {
    const SelectorSpec spec = make_spec(o, name);
    const SubsetDrawer drawer = [&](Rng& rng) { return select(spec, ds.X, svd, k, rng); };
    const RiskEstimate est = excess_risk_mc(
        problem, drawer, trials, Rng(o.seed, kRiskStream + static_cast<std::uint64_t>(spec.kind)));
    estimates.push_back({{"algorithm", std::string(selector_name(spec.kind))},
                         {"mean", est.mean},
                         {"stderr", est.std_error}});
    csv << ds.id << ',' << selector_name(spec.kind) << ',' << est.mean << ',' << est.std_error
        << '\n';
  }
  j["selectors"] = estimates;
  emit(o, o.format == "csv" ? csv.str() : dump(j), out);
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset, "CSV file, one observation per row");
  cmd->add_option("--toy", o.toy, "proj-3, proj-5, smooth-3, smooth-5, identity-20 or diag:v1,v2,...");
  cmd->add_option("--k", o.k, "target rank");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--theta", o.theta, "rejection DPP parameter (> 1)");
  cmd->add_option("--out", o.out, "output path (stdout when omitted)");
  cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--standardize", o.standardize, "center and scale columns of --dataset");
  cmd->add_flag("--header", o.header, "skip the first line of --dataset");
  cmd->add_option("--p", o.p, "number of nonzero leverage scores for --toy");
  cmd->add_option("--N", o.n_rows, "rows generated for --toy");
  cmd->add_option("--ell", o.ell, "file with the leverage profile for --toy");
}

void add_selector_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--algo", o.algos, "comma-separated algorithms")->delimiter(',');
  cmd->add_option("--c", o.c, "double-phase preselection size (default 10k)");
  cmd->add_option("--s", o.s, "draws of the multinomial samplers (default k)");
  cmd->add_option("--threshold", o.threshold, "threshold selection level in (k-1, k]");
  cmd->add_flag("--timings", o.timings, "include wall-clock times in the output");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Column subset selection with determinantal point processes"};
  app.require_subcommand(1);
  Options o;

  CLI::App* gen = app.add_subcommand("gen", "generate a toy matrix with a leverage profile");
  add_common(gen, o);

  CLI::App* sel = app.add_subcommand("select", "select k columns once");
  add_common(sel, o);
  add_selector_options(sel, o);

  CLI::App* bench = app.add_subcommand("bench", "repeated selections and boosting");
  add_common(bench, o);
  add_selector_options(bench, o);
  bench->add_option("--reps", o.reps, "selections per algorithm");
  bench->add_option("--boost-rounds", o.boost_rounds, "rounds of best-of-batch boosting");
  bench->add_option("--boost-batch", o.boost_batch, "draws per boosting round");

  CLI::App* bounds = app.add_subcommand("bounds", "theoretical bounds and exact expectations");
  add_common(bounds, o);

  Index trials = 1000;
  CLI::App* risk = app.add_subcommand("risk", "Monte Carlo excess risk of sparse regression");
  add_common(risk, o);
  add_selector_options(risk, o);
  risk->add_option("--reps", trials, "Monte Carlo trials");
  risk->add_option("--noise-var", o.noise_var, "noise variance v");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen) {
      return cmd_gen(o, out);
    }
    if (*sel) {
      return cmd_select(o, out);
    }
    if (*bench) {
      return cmd_bench(o, out);
    }
    if (*bounds) {
      return cmd_bounds(o, out);
    }
    return cmd_risk(o, out, trials);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cssdpp::cli
