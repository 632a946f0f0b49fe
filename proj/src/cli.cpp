#include "osgood/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "osgood/carleman.hpp"
#include "osgood/dyadic.hpp"
#include "osgood/error.hpp"
#include "osgood/kernels.hpp"
#include "osgood/modulus.hpp"
#include "osgood/mollify.hpp"
#include "osgood/pliss.hpp"
#include "osgood/report.hpp"
#include "osgood/suite.hpp"
#include "osgood/weight.hpp"

namespace osgood::cli {

namespace fs = std::filesystem;

namespace {

// Files are written under a temporary name and renamed on commit; anything
// not committed is removed when the stage goes out of scope.
class Stage {
 public:
  explicit Stage(fs::path dir) : dir_(std::move(dir)) {}
  Stage(const Stage&) = delete;
  Stage& operator=(const Stage&) = delete;
  ~Stage() {
    for (auto& f : files_) {
      f.os.reset();
      std::error_code ec;
      fs::remove(f.tmp, ec);
    }
  }

  std::ostream& open(const std::string& name) {
    File f;
    f.final = dir_ / name;
    f.tmp = dir_ / ("." + name + ".partial");
    f.os = std::make_unique<std::ofstream>(f.tmp, std::ios::binary | std::ios::trunc);
    if (!*f.os) throw Error("cannot write " + f.tmp.string());
    files_.push_back(std::move(f));
    return *files_.back().os;
  }

  std::vector<fs::path> commit() {
    std::vector<fs::path> done;
    for (auto& f : files_) {
      f.os->flush();
      if (!*f.os) throw Error("write failed for " + f.final.string());
      f.os.reset();
    }
    for (auto& f : files_) {
      fs::rename(f.tmp, f.final);
      done.push_back(f.final);
    }
    files_.clear();
    return done;
  }

 private:
  struct File {
    fs::path final, tmp;
    std::unique_ptr<std::ofstream> os;
  };
  fs::path dir_;
  std::vector<File> files_;
};

// Flat numeric table as CSV or JSON lines.
void write_table(std::ostream& os, Format fmt, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
  char buf[32];
  if (fmt == Format::Csv) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r[i]);
        os << (i ? "," : "") << buf;
      }
      os << '\n';
    }
    return;
  }
  for (const auto& r : rows) {
    Json j = Json::object();
    for (std::size_t i = 0; i < r.size(); ++i) j[header[i]] = json_number(r[i]);
    os << j.dump() << '\n';
  }
}

const char* table_ext(Format f) { return f == Format::Csv ? ".csv" : ".jsonl"; }

Modulus convergent_modulus(const std::string& name) {
  const Modulus mu = Modulus::from_name(name);
  return mu.normalized() ? mu : normalize_sqrt_cap(mu);
}

double parse_t_max(const RunConfig& cfg, double fallback) {
  return cfg.t_max ? parse_scale(*cfg.t_max) : fallback;
}

// ---- mu ----

VerificationReport cmd_mu(const RunConfig& cfg) {
  VerificationReport rep("mu");
  const std::string name = cfg.mu.empty() ? "sqrt" : cfg.mu;
  if (cfg.action == "list") {
    for (const auto& n : Modulus::builtin_names()) {
      const std::string probe = n == "power:<alpha>" ? "power:0.5" : n;
      const Modulus mu = Modulus::from_name(probe);
      rep.add("builtin-" + n, "plumbing", true, std::nullopt, to_string(mu.osgood_class()))
          .with("mu(1/2)", mu(0.5));
    }
  } else if (cfg.action == "eval") {
    if (!(cfg.s >= 0.0 && cfg.s <= 1.0)) throw UsageError("--s must lie in [0, 1]");
    const Modulus mu = Modulus::from_name(name);
    const double v = mu(cfg.s);
    rep.add("eval-" + name, "modulus of continuity", std::isfinite(v) && v >= 0.0 && v <= 1.0)
        .with("s", cfg.s)
        .with("mu", v);
  } else if (cfg.action == "osgood") {
    const Modulus mu = Modulus::from_name(name);
    try {
      const OsgoodResult res = osgood_integral(mu, cfg.floor);
      rep.add("osgood-" + name, "Osgood condition on the integral of 1/mu",
              res.classification == mu.osgood_class() ||
                  res.classification == OsgoodClass::Unknown,
              std::nullopt, to_string(res.classification))
          .with("integral", res.value)
          .with("floor", cfg.floor)
          .with("diagnostic", res.diagnostic)
          .with("decay_rate", res.decay_rate)
          .with("power_decay", res.power_decay)
          .with("growth_slope", res.growth_slope);
    } catch (const ClassificationMismatch& e) {
      rep.add("osgood-" + name, "Osgood condition on the integral of 1/mu", false, std::nullopt,
              e.what());
    }
  } else {
    const Modulus mu = Modulus::from_name(name);
    rep = check_modulus_properties(mu, cfg.samples);
  }
  return rep;
}

// ---- weight ----

VerificationReport cmd_weight(const RunConfig& cfg, Stage& stage) {
  const Modulus mu = Modulus::from_name(cfg.mu.empty() ? "linear" : cfg.mu);
  const double t_max = parse_t_max(cfg, cfg.action == "probe" ? std::exp(257.0) : 1e3);
  const WeightTable wt = build_Phi(build_phi(mu, t_max, cfg.quad_tol));
  VerificationReport rep("weight");

  if (cfg.action == "build") {
    std::vector<std::vector<double>> rows;
    const auto& u = wt.log_t_nodes();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double tau = wt.phi_nodes()[i];
      rows.push_back({std::exp(u[i]), tau, tau, wt.Phi(tau), wt.Phi1(tau), wt.Phi2(tau)});
    }
    write_table(stage.open(std::string("weight-table") + table_ext(cfg.format)), cfg.format,
                {"t", "phi", "tau", "Phi", "Phi1", "Phi2"}, rows);
    const IdentityResidual res = phi_identity_residual(wt, 0);
    rep.add("table-built", "plumbing", wt.node_count() >= 2)
        .with("nodes", static_cast<double>(wt.node_count()))
        .with("t_max", wt.t_max())
        .with("tau_max", wt.tau_max());
    rep.add("phi-second-derivative-identity", "Phi'' = (Phi')^2 mu(1/Phi')",
            res.max_relative <= 1e-6, 1e-6)
        .with("max_relative", res.max_relative)
        .with("at_tau", res.at_tau);
  } else if (cfg.action == "eval") {
    const double w = weight_value(wt, cfg.gamma, cfg.T, cfg.t);
    rep.add("weight-value", "Carleman weight exp((2/gamma) Phi(gamma (T - t)))",
            std::isfinite(w) && w >= 1.0)
        .with("gamma", cfg.gamma)
        .with("T", cfg.T)
        .with("t", cfg.t)
        .with("weight", w)
        .with("Phi", wt.Phi(cfg.gamma * (cfg.T - cfg.t)));
  } else if (cfg.action == "check") {
    rep = check_weight_table(wt, cfg.seed);
  } else {
    CarlemanProbeConfig pc;
    pc.T = cfg.T;
    pc.grid = cfg.grid;
    pc.dim = cfg.dim;
    pc.test_family = cfg.family;
    const auto probe = probe_carleman(pc, wt, CoefficientField::identity(pc.dim, pc.grid));
    rep = probe.to_report();
    std::vector<std::vector<double>> rows;
    for (const auto& r : probe.rows)
      rows.push_back({r.gamma, r.lhs, r.rhs_bracket, r.ratio_half, r.ratio_full});
    write_table(stage.open(std::string("carleman-probe") + table_ext(cfg.format)), cfg.format,
                {"gamma", "lhs", "rhs_bracket", "ratio_half", "ratio_full"}, rows);
  }
  return rep;
}

// ---- lp ----

GridField band_field(const RunConfig& cfg, const DyadicPartition& part, std::uint64_t seed) {
  return GridField::random_band(cfg.dim, cfg.resolution, 0.0, std::ldexp(1.0, part.nu_max), seed);
}

VerificationReport cmd_lp(const RunConfig& cfg, Stage& stage) {
  if (cfg.dim != 1 && cfg.dim != 2) throw UsageError("--dim must be 1 or 2");
  if (!is_power_of_two(cfg.resolution) || cfg.resolution < 8)
    throw UsageError("--resolution must be a power of two >= 8");
  const auto part = DyadicPartition::for_grid(cfg.dim, cfg.resolution);
  VerificationReport rep("lp");

  if (cfg.action == "decompose") {
    const GridField u = band_field(cfg, part, cfg.seed);
    const auto blocks = kernels::lp_blocks(part, u, kernels::Backend::OpenMP);
    std::vector<std::string> header{"x"};
    if (cfg.dim == 2) header.push_back("y");
    header.push_back("u");
    for (std::size_t nu = 0; nu < blocks.size(); ++nu) header.push_back("block_" + std::to_string(nu));
    std::vector<std::vector<double>> rows;
    rows.reserve(u.size());
    const std::size_t n = cfg.resolution;
    for (std::size_t i = 0; i < u.size(); ++i) {
      std::vector<double> r;
      if (cfg.dim == 1) {
        r.push_back(u.coord(i));
      } else {
        r.push_back(u.coord(i / n));
        r.push_back(u.coord(i % n));
      }
      r.push_back(u[i].real());
      for (const auto& b : blocks) r.push_back(b[i].real());
      rows.push_back(std::move(r));
    }
    write_table(stage.open(std::string("lp-blocks") + table_ext(cfg.format)), cfg.format, header,
                rows);
    GridField sum(cfg.dim, cfg.resolution);
    for (const auto& b : blocks) sum += b;
    const double err = (sum - u).l2_norm() / u.l2_norm();
    rep.add("reconstruction", "sum of blocks equals a band-limited field", err <= 1e-12, 1e-12)
        .with("relative_error", err)
        .with("blocks", static_cast<double>(blocks.size()));
  } else if (cfg.action == "check") {
    rep = check_partition(part, 4096);
    int outside = 0;
    double lo = 2.0, hi = 0.0;
    for (int i = 0; i < cfg.fields; ++i) {
      const auto r = check_almost_orthogonality(part, band_field(cfg, part, cfg.seed + i));
      if (!r.within_half_one) ++outside;
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    rep.add("almost-orthogonality", "1/2 <= sum ||u_nu||^2 / ||u||^2 <= 1", outside == 0, 0.0)
        .with("fields", cfg.fields)
        .with("fields_outside", outside)
        .with("min_ratio", lo)
        .with("max_ratio", hi);
    const GridField u = band_field(cfg, part, cfg.seed);
    for (int nu = 0; nu <= part.nu_max; ++nu) {
      const auto bern = check_bernstein(part, u, nu);
      for (const auto& row : bern.rows()) rep.append(row);
    }
  } else {
    const std::size_t n = cfg.resolution;
    const GridField a = GridField::from_function(
        cfg.dim, n, [](double x, double) { return cplx(1.0 + 0.3 * std::cos(x), 0.0); });
    CoefficientField var = CoefficientField::identity(cfg.dim, n);
    var.entries[0] = a;
    const GridField v =
        GridField::from_function(cfg.dim, n, [](double x, double) { return cplx(std::cos(8 * x), 0); });
    rep = probe_commutator_bound({CoefficientField::identity(cfg.dim, n), var}, v);
  }
  return rep;
}

// ---- mollify ----

VerificationReport cmd_mollify(const RunConfig& cfg) {
  const Modulus mu = convergent_modulus(cfg.mu.empty() ? "sqrt" : cfg.mu);
  const double e_min = parse_scale(cfg.eps_min), e_max = parse_scale(cfg.eps_max);
  if (!(e_min > 0.0 && e_min <= e_max && e_max <= 0.5))
    throw UsageError("need 0 < eps-min <= eps-max <= 1/2");
  std::vector<double> eps;
  for (double e = e_max; e >= e_min * (1.0 - 1e-12); e *= 0.5) eps.push_back(e);

  TimeFunction a;
  if (cfg.mollify_family == "sawtooth") {
    a = sawtooth_family(mu);
  } else if (cfg.mollify_family == "pliss-l") {
    a = pliss_l_family(mu, e_max);
  } else if (cfg.mollify_family == "linear") {
    a = linear_family(mu);
  } else if (cfg.mollify_family == "constant") {
    a = constant_family(1.0);
  } else {
    throw UsageError("--family must be sawtooth, pliss-l, linear or constant");
  }
  return verify_mollifier_bounds(a, mu, MollifierKernel(), eps);
}

// ---- pliss ----

PlissConstruction build_construction(const RunConfig& cfg, VerificationReport* rep) {
  const Modulus mu = convergent_modulus(cfg.mu.empty() ? "sqrt" : cfg.mu);
  const auto cuts = make_cutoffs();
  int k0 = 0, seed = 0;
  if (cfg.k0 == "auto") {
    const K0Choice c = choose_k0(mu, cfg.segments.value_or(200), cuts);
    k0 = c.k0;
    seed = c.seed;
  } else {
    try {
      std::size_t used = 0;
      k0 = std::stoi(cfg.k0, &used);
      if (used != cfg.k0.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--k0 must be 'auto' or an integer");
    }
  }
  const int N = cfg.segments.value_or(default_segments(mu, k0));
  if (rep) {
    rep->add("k0", "admissible shift k0", k0 >= 1, std::nullopt, cfg.k0 == "auto" ? "auto" : "given")
        .with("k0", k0)
        .with("seed", seed)
        .with("segments", N);
  }
  return PlissConstruction(build_sequences(mu, k0, N), cuts,
                           cfg.reflected ? Orientation::ReflectedTime : Orientation::ConstructionTime);
}

VerificationReport cmd_pliss(const RunConfig& cfg, Stage& stage) {
  VerificationReport rep("pliss");
  const PlissConstruction pc = build_construction(cfg, &rep);
  const auto& S = pc.seqs();

  if (cfg.action == "build") {
    std::vector<std::vector<double>> rows;
    for (int n = 1; n <= S.N; ++n)
      rows.push_back({static_cast<double>(n), S.a[n], S.r[n], S.z[n], S.q[n], S.p[n]});
    write_table(stage.open(std::string("pliss-sequences") + table_ext(cfg.format)), cfg.format,
                {"n", "a", "r", "z", "q", "p"}, rows);
    bool increasing = true;
    for (int n = 1; n <= S.N; ++n) increasing = increasing && S.a[n] < S.a[n + 1];
    rep.add("sequences-built", "time nodes increase to a_{N+1} < 0", increasing && S.a[S.N + 1] < 0)
        .with("a_1", S.a[1])
        .with("a_N+1", S.a[S.N + 1])
        .with("r_1", S.r[1])
        .with("z_1", S.z[1]);
  } else if (cfg.action == "eval") {
    const PointEval pe = pc.eval(cfg.t, cfg.x1, cfg.x2);
    const double log_abs =
        pe.u == 0.0 ? -std::numeric_limits<double>::infinity() : pe.log_scale + std::log(std::abs(pe.u));
    rep.add("eval", "counterexample PDE residual", pe.residual <= 1e-10 && !pe.degenerate, 1e-10)
        .with("t", pe.t)
        .with("x1", pe.x1)
        .with("x2", pe.x2)
        .with("segment", pe.segment)
        .with("u", pe.physical(pe.u))
        .with("log_abs_u", log_abs)
        .with("l", pe.l)
        .with("b1", pe.b1)
        .with("b2", pe.b2)
        .with("c", pe.c)
        .with("residual", pe.residual);
  } else if (cfg.action == "verify") {
    SolutionCheckConfig sc;
    sc.residual_points = cfg.points;
    sc.l_samples = cfg.points;
    sc.seed = cfg.seed;
    for (const auto& part : {verify_conditions(pc, S.N), verify_cmu_regularity(pc, cfg.pairs, cfg.seed),
                             verify_solution(pc, sc)})
      for (const auto& row : part.rows()) rep.append(row);
  } else {
    ExportGrid grid;
    if (cfg.export_grid) {
      try {
        grid = ExportGrid::parse(*cfg.export_grid);
      } catch (const Error& e) {
        throw UsageError(std::string("--grid: ") + e.what());
      }
    } else {
      const double lo = S.a[1] - 0.01, hi = S.a[S.N];
      grid.t0 = cfg.reflected ? -hi : lo;
      grid.t1 = cfg.reflected ? -lo : hi;
      grid.nt = 21;
      grid.x0 = grid.y0 = -std::numbers::pi;
      grid.x1 = grid.y1 = std::numbers::pi;
      grid.nx = grid.ny = 16;
    }
    const bool json = cfg.format == Format::Json;
    const std::size_t rows =
        export_construction(pc, grid, stage.open(json ? "pliss-export.jsonl" : "pliss-export.csv"), json);
    rep.add("export-rows", "plumbing", rows == grid.rows())
        .with("rows", static_cast<double>(rows))
        .with("nt", grid.nt)
        .with("nx", grid.nx)
        .with("ny", grid.ny);
  }
  return rep;
}

// ---- all ----

VerificationReport cmd_all(const RunConfig& cfg, std::ostream& out) {
  std::vector<VerificationReport> parts;
  for (const auto& c : suite::criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep = suite::run_criterion(c.id, cfg.seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto s = rep.summary();
    char line[160];
    std::snprintf(line, sizeof line, "criterion %d %-34s %s  %zu/%zu rows  %.2f s\n", c.id,
                  c.title.c_str(), s.failed == 0 ? "PASS" : "FAIL", s.passed, s.total, secs);
    out << line;
    parts.push_back(std::move(rep));
  }
  return report_merge(parts);
}

}  // namespace

double parse_scale(const std::string& text) {
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + text + "'");
    }
    if (used != s.size()) throw UsageError("not a number: '" + text + "'");
    return v;
  };
  if (text.rfind("2^", 0) == 0) return std::exp2(number(text.substr(2)));
  if (text.rfind("e^", 0) == 0) return std::exp(number(text.substr(2)));
  return number(text);
}

std::optional<RunConfig> parse(const std::vector<std::string>& args, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"Osgood-modulus numerical laboratory", "osgood"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir, format = "csv";
  app.add_option("--out", out_dir, "Output directory (default: $OSGOOD_OUT_DIR or .)");
  app.add_option("--format", format, "Table/grid export format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--quad-tol", cfg.quad_tol, "Quadrature tolerance for weight tables")
      ->check(CLI::PositiveNumber);

  const auto action = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->callback([&cfg, parent, name] {
      cfg.command = parent->get_name();
      cfg.action = name;
    });
    return sub;
  };

  CLI::App* mu = app.add_subcommand("mu", "Moduli of continuity");
  mu->require_subcommand(1);
  action(mu, "list", "List builtin moduli");
  for (auto [name, help] : {std::pair{"eval", "Evaluate mu(s)"},
                            std::pair{"osgood", "Osgood integral and classification"},
                            std::pair{"check", "Check modulus properties"}}) {
    CLI::App* sub = action(mu, name, help);
    sub->add_option("--name", cfg.mu, "Modulus name")->required();
    if (std::string(name) == "eval") sub->add_option("--s", cfg.s, "Argument in [0, 1]")->required();
    if (std::string(name) == "osgood") sub->add_option("--floor", cfg.floor)->check(CLI::PositiveNumber);
    if (std::string(name) == "check") sub->add_option("--samples", cfg.samples)->check(CLI::PositiveNumber);
  }

  CLI::App* weight = app.add_subcommand("weight", "Carleman weight tables");
  weight->require_subcommand(1);
  for (auto [name, help] : {std::pair{"build", "Tabulate phi, phi^-1 and Phi"},
                            std::pair{"eval", "Evaluate exp((2/gamma) Phi(gamma (T - t)))"},
                            std::pair{"check", "Check the Phi'' identity and closed forms"},
                            std::pair{"probe", "Probe the Carleman inequality over gamma"}}) {
    CLI::App* sub = action(weight, name, help);
    sub->add_option("--mu", cfg.mu, "Divergent modulus (default linear)");
    sub->add_option("--t-max", cfg.t_max, "Table extent, number or e^<x>");
    sub->add_option("--T", cfg.T, "Horizon")->check(CLI::PositiveNumber);
    if (std::string(name) == "eval") {
      sub->add_option("--gamma", cfg.gamma)->check(CLI::PositiveNumber);
      sub->add_option("--t", cfg.t);
    }
    if (std::string(name) == "probe") {
      sub->add_option("--family", cfg.family)->check(CLI::IsMember({"zero", "sine-cos", "const-time"}));
      sub->add_option("--grid", cfg.grid)->check(CLI::PositiveNumber);
      sub->add_option("--dim", cfg.dim)->check(CLI::Range(1, 2));
    }
  }

  CLI::App* lp = app.add_subcommand("lp", "Littlewood-Paley blocks");
  lp->require_subcommand(1);
  for (auto [name, help] : {std::pair{"decompose", "Split a random field into blocks"},
                            std::pair{"check", "Reconstruction, orthogonality, Bernstein"},
                            std::pair{"probe", "Commutator ratio across resolutions"}}) {
    CLI::App* sub = action(lp, name, help);
    sub->add_option("--resolution", cfg.resolution, "Points per axis (power of two)");
    sub->add_option("--dim", cfg.dim)->check(CLI::Range(1, 2));
    if (std::string(name) == "check") sub->add_option("--fields", cfg.fields)->check(CLI::PositiveNumber);
  }

  CLI::App* mollify = app.add_subcommand("mollify", "Mollifier bounds");
  mollify->require_subcommand(1);
  {
    CLI::App* sub = action(mollify, "check", "Sweep eps and fit C, C~");
    sub->add_option("--mu", cfg.mu, "Modulus (square-root cap applied)");
    sub->add_option("--family", cfg.mollify_family, "sawtooth | pliss-l | linear | constant");
    sub->add_option("--eps-min", cfg.eps_min, "Smallest eps, e.g. 2^-14");
    sub->add_option("--eps-max", cfg.eps_max, "Largest eps, e.g. 2^-4");
  }

  CLI::App* pliss = app.add_subcommand("pliss", "Counterexample construction");
  pliss->require_subcommand(1);
  for (auto [name, help] : {std::pair{"build", "Build time nodes and sequences"},
                            std::pair{"eval", "Evaluate u, l and the residual at a point"},
                            std::pair{"verify", "Sequence conditions, C^mu regularity, PDE"},
                            std::pair{"export", "Write u, l, b1, c on a grid"}}) {
    CLI::App* sub = action(pliss, name, help);
    sub->add_option("--mu", cfg.mu, "Convergent modulus (square-root cap applied)");
    sub->add_option("--k0", cfg.k0, "auto or an integer");
    sub->add_option("--segments", cfg.segments, "Number of segments N")->check(CLI::Range(10, 10000000));
    sub->add_flag("--reflected", cfg.reflected, "Use reflected time (support t >= 0)");
    const std::string n = name;
    if (n == "eval") {
      sub->add_option("--t", cfg.t)->required();
      sub->add_option("--x1", cfg.x1);
      sub->add_option("--x2", cfg.x2);
    }
    if (n == "verify") {
      sub->add_option("--pairs", cfg.pairs)->check(CLI::PositiveNumber);
      sub->add_option("--points", cfg.points)->check(CLI::PositiveNumber);
    }
    if (n == "export") sub->add_option("--grid", cfg.export_grid, "t0:t1:nt,x0:x1:nx[,y0:y1:ny]");
  }

  app.add_subcommand("all", "Run the acceptance suite")->callback([&cfg] {
    cfg.command = "all";
    cfg.action.clear();
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (cfg.command.empty()) throw UsageError("missing action");
  cfg.format = format == "json" ? Format::Json : Format::Csv;
  if (!out_dir.empty()) {
    cfg.out_dir = out_dir;
  } else if (const char* env = std::getenv("OSGOOD_OUT_DIR"); env && *env) {
    cfg.out_dir = env;
  }
  return cfg;
}

std::string canonical(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << c.command << ' ' << c.action << " format=" << (c.format == Format::Json ? "json" : "csv")
     << " seed=" << c.seed << " quad_tol=" << c.quad_tol << " mu=" << c.mu << " s=" << c.s
     << " floor=" << c.floor << " samples=" << c.samples << " t_max=" << c.t_max.value_or("")
     << " gamma=" << c.gamma << " T=" << c.T << " t=" << c.t << " family=" << c.family
     << " grid=" << c.grid << " resolution=" << c.resolution << " dim=" << c.dim
     << " fields=" << c.fields << " mollify_family=" << c.mollify_family << " eps=" << c.eps_min << ".." << c.eps_max << " k0=" << c.k0
     << " segments=" << (c.segments ? std::to_string(*c.segments) : "default") << " x=" << c.x1
     << ',' << c.x2 << " reflected=" << c.reflected << " pairs=" << c.pairs
     << " points=" << c.points << " export=" << c.export_grid.value_or("default");
  return os.str();
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (!fs::is_directory(cfg.out_dir)) throw Error("cannot create " + cfg.out_dir.string());

    Stage stage(cfg.out_dir);
    VerificationReport rep;
    if (cfg.command == "mu") {
      rep = cmd_mu(cfg);
    } else if (cfg.command == "weight") {
      rep = cmd_weight(cfg, stage);
    } else if (cfg.command == "lp") {
      rep = cmd_lp(cfg, stage);
    } else if (cfg.command == "mollify") {
      rep = cmd_mollify(cfg);
    } else if (cfg.command == "pliss") {
      rep = cmd_pliss(cfg, stage);
    } else if (cfg.command == "all") {
      rep = cmd_all(cfg, out);
    } else {
      throw UsageError("unknown command '" + cfg.command + "'");
    }
    rep.provenance().config_hash = fnv1a_hex(canonical(cfg));
    rep.provenance().seed = cfg.seed;

    const std::string stem = cfg.action.empty() ? cfg.command : cfg.command + "-" + cfg.action;
    stage.open(stem + ".json") << rep.to_json().dump(2) << '\n';
    const auto written = stage.commit();

    const auto s = rep.summary();
    out << stem << ": " << s.passed << "/" << s.total << " checks passed\n";
    for (const auto& row : rep.rows())
      if (!row.pass) out << "  FAIL " << row.module << "/" << row.check_id << "\n";
    for (const auto& p : written) out << "  wrote " << p.string() << "\n";
    return s.failed == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse(args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return 1;
  }
  if (!cfg) return 0;
  return run(*cfg, out, err);
}

}  // namespace osgood::cli
