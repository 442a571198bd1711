#include "hkt/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "hkt/special.hpp"

namespace hkt {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_cx(cx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// Per-point result slot for a suite sweep.
struct PointOutcome {
  bool ok = false;
  std::string skip_kind;
  std::string skip_msg;
  std::vector<std::pair<std::string, double>> residuals;
  std::string sig;
  double tail = 0.0;
};

using PointEval = std::function<void(const ChartPoint&, PointOutcome&)>;
using BudgetOf = std::function<double(const std::string&)>;

SuiteResult sweep(const std::string& name, const std::vector<ChartPoint>& points,
                  const PointEval& eval, const BudgetOf& budget_of, RunReport& report) {
  const int count = static_cast<int>(points.size());
  std::vector<PointOutcome> out(static_cast<std::size_t>(count));
  parallel_for(count, [&](int i) {
    PointOutcome& o = out[static_cast<std::size_t>(i)];
    try {
      eval(points[static_cast<std::size_t>(i)], o);
      o.ok = true;
    } catch (const DomainError& e) {
      o.skip_kind = "DomainError";
      o.skip_msg = e.what();
    } catch (const NonInvertibleImTau& e) {
      o.skip_kind = "NonInvertibleImTau";
      o.skip_msg = e.what();
    } catch (const DegenerateFrame& e) {
      o.skip_kind = "DegenerateFrame";
      o.skip_msg = e.what();
    } catch (const SupportViolation& e) {
      o.skip_kind = "SupportViolation";
      o.skip_msg = e.what();
    }
  });

  SuiteResult res;
  res.name = name;
  std::map<std::string, ResidualStat> stats;
  const bool fill_census = report.signature_census.empty();
  for (int i = 0; i < count; ++i) {
    const PointOutcome& o = out[static_cast<std::size_t>(i)];
    if (!o.ok) {
      ++res.skipped;
      res.skipped_points.push_back(format_point(points[static_cast<std::size_t>(i)]) +
                                   ": skipped: " + o.skip_kind + ": " + o.skip_msg);
      continue;
    }
    ++res.evaluated;
    report.max_tail = std::max(report.max_tail, o.tail);
    if (fill_census && !o.sig.empty()) ++report.signature_census[o.sig];
    for (const auto& [rname, val] : o.residuals) {
      auto [it, inserted] = stats.try_emplace(rname);
      ResidualStat& st = it->second;
      if (inserted) {
        st.name = rname;
        st.budget = budget_of(rname);
        st.worst = val;
        st.worst_point = format_point(points[static_cast<std::size_t>(i)]);
      } else if (val > st.worst) {
        st.worst = val;
        st.worst_point = format_point(points[static_cast<std::size_t>(i)]);
      }
    }
  }
  for (auto& [key, st] : stats) {
    st.pass = st.worst <= st.budget;
    res.pass = res.pass && st.pass;
    res.max_residual = std::max(res.max_residual, st.worst);
    res.residuals.push_back(st);
  }
  return res;
}

std::string signature_string(const TensorReport& rep) {
  std::ostringstream os;
  os << "(" << rep.sig_pos << "," << rep.sig_neg << ")";
  return os.str();
}

json complex_json(cx z) { return json::array({z.real(), z.imag()}); }

json config_json(const RunConfig& c) {
  json j;
  j["n"] = c.n;
  if (!c.name.empty())
    j["prepotential"] = c.name;
  else
    j["expression"] = c.expression;
  if (!c.params.empty()) {
    json p = json::object();
    for (const auto& [key, vals] : c.params) {
      json arr = json::array();
      for (cx v : vals) arr.push_back(complex_json(v));
      p[key] = arr;
    }
    j["params"] = p;
  }
  json charges = json::array();
  for (const ChargeEntry& e : c.charges) {
    json ce;
    ce["m"] = e.m;
    ce["k"] = e.k;
    ce["omega"] = e.omega;
    charges.push_back(ce);
  }
  j["charges"] = charges;
  j["grid"] = {{"re_min", c.grid.re_min},   {"re_max", c.grid.re_max},
               {"im_min", c.grid.im_min},   {"im_max", c.grid.im_max},
               {"re_count", c.grid.re_count}, {"im_count", c.grid.im_count},
               {"fiber_count", c.grid.fiber_count}};
  j["seed"] = c.seed;
  j["tolerances"] = {{"tail_tol", c.tail_tol},
                     {"h_fd", c.h_fd},
                     {"cond_max", c.cond_max},
                     {"support_floor", c.support_floor},
                     {"budget_algebraic", c.budget_algebraic},
                     {"budget_fd", c.budget_fd},
                     {"budget_series", c.budget_series},
                     {"budget_periodicity", c.budget_periodicity}};
  j["suites"] = c.suites;
  json zs = json::array();
  for (cx z : c.zeta_samples) zs.push_back(complex_json(z));
  j["zeta_samples"] = zs;
  return j;
}

json suite_json(const SuiteResult& s) {
  json j;
  j["name"] = s.name;
  j["pass"] = s.pass;
  j["max_residual"] = s.max_residual;
  j["evaluated"] = s.evaluated;
  j["skipped"] = s.skipped;
  j["skipped_points"] = s.skipped_points;
  json rs = json::array();
  for (const ResidualStat& st : s.residuals) {
    json r;
    r["name"] = st.name;
    r["worst"] = st.worst;
    r["budget"] = st.budget;
    r["worst_point"] = st.worst_point;
    r["pass"] = st.pass;
    rs.push_back(r);
  }
  j["residuals"] = rs;
  return j;
}

}  // namespace

void parallel_for(int count, const std::function<void(int)>& fn) {
  int threads = 1;
  if (const char* env = std::getenv("HKT_THREADS")) threads = std::max(1, std::atoi(env));
  threads = std::min(threads, count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
  auto body = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
      });
    }
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunContext build_context(const RunConfig& config) {
  const int n = config.n;
  Prepotential F = config.name.empty()
                       ? Prepotential::parse(config.expression, n)
                       : catalog_prepotential(config.name, n, config.params);

  JoyceProvider provider = JoyceProvider::zero(n);
  if (!config.charges.empty()) {
    std::vector<std::pair<Charge, Rational>> entries;
    for (const ChargeEntry& e : config.charges)
      entries.emplace_back(Charge{e.m, e.k}, Rational::parse(e.omega));
    provider = JoyceProvider::uncoupled(BpsStructure::make(n, entries), config.tail_tol,
                                        config.support_floor);
  }

  // Deterministic sample: a regular base lattice for n = 1, seeded uniform
  // draws from the box for n >= 2; fiber sample 0 sits at angle zero, the
  // rest are seeded uniform angles.
  std::mt19937 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const GridConfig& g = config.grid;
  std::vector<VectorXcd> bases;
  if (n == 1) {
    for (int ir = 0; ir < g.re_count; ++ir) {
      const double re =
          g.re_count == 1 ? 0.5 * (g.re_min + g.re_max)
                          : g.re_min + (g.re_max - g.re_min) * ir / (g.re_count - 1);
      for (int ii = 0; ii < g.im_count; ++ii) {
        const double im =
            g.im_count == 1 ? 0.5 * (g.im_min + g.im_max)
                            : g.im_min + (g.im_max - g.im_min) * ii / (g.im_count - 1);
        VectorXcd Z(1);
        Z(0) = cx(re, im);
        bases.push_back(Z);
      }
    }
  } else {
    const int count = g.re_count * g.im_count;
    for (int c = 0; c < count; ++c) {
      VectorXcd Z(n);
      for (int i = 0; i < n; ++i) {
        const double re = g.re_min + (g.re_max - g.re_min) * unit(rng);
        const double im = g.im_min + (g.im_max - g.im_min) * unit(rng);
        Z(i) = cx(re, im);
      }
      bases.push_back(Z);
    }
  }
  std::vector<ChartPoint> points;
  for (const VectorXcd& base : bases) {
    for (int f = 0; f < g.fiber_count; ++f) {
      ChartPoint pt;
      pt.Z = base;
      pt.phi_up = VectorXd::Zero(n);
      pt.phi_dn = VectorXd::Zero(n);
      if (f > 0) {
        for (int i = 0; i < n; ++i) pt.phi_up(i) = kTwoPi * unit(rng);
        for (int i = 0; i < n; ++i) pt.phi_dn(i) = kTwoPi * unit(rng);
      }
      points.push_back(std::move(pt));
    }
  }
  return RunContext{std::move(F), std::move(provider), std::move(points)};
}

std::string format_point(const ChartPoint& pt) {
  const int n = static_cast<int>(pt.Z.size());
  std::ostringstream os;
  os.precision(6);
  os << "Z=[";
  for (int i = 0; i < n; ++i) os << (i ? ", " : "") << format_cx(pt.Z(i));
  os << "] phi^=[";
  for (int i = 0; i < n; ++i) os << (i ? ", " : "") << pt.phi_up(i);
  os << "] phi_=[";
  for (int i = 0; i < n; ++i) os << (i ? ", " : "") << pt.phi_dn(i);
  os << "]";
  return os.str();
}

RunReport run_verify(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunContext ctx = build_context(config);
  RunReport report;
  std::vector<cx> zeta_storage = config.zeta_samples;
  if (zeta_storage.empty())
    zeta_storage = {cx(1, 0), cx(0, 1), cx(-1, 0), cx(0, -1), cx(2, 0), cx(0.5, 0.5)};
  const std::span<const cx> zetas(zeta_storage);

  std::vector<std::string> selected = config.suites;
  if (selected.empty())
    selected = {"flatness", "plebanski", "quaternion", "closedness",
                "nijenhuis", "crosscheck", "integrable", "dilog"};
  for (const std::string& suite : selected) {
    PointEval eval;
    BudgetOf budget = [&config](const std::string&) { return config.budget_fd; };

    if (suite == "flatness") {
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const FlatnessResiduals r = flatness_residuals(ctx.F, ctx.provider, pt, zetas,
                                                       config.h_fd, config.cond_max);
        static const char* names[5] = {"bracket[hh]", "bracket[h,vbar]", "bracket[vv]",
                                       "bracket[hhbar-vbarv]", "bracket[hv]"};
        for (int k = 0; k < 5; ++k) o.residuals.emplace_back(names[k], r.termwise[k]);
        for (const auto& [zk, val] : r.by_zeta)
          o.residuals.emplace_back("direct[zeta=" + zk + "]", val);
      };
    } else if (suite == "plebanski") {
      budget = [&config](const std::string&) { return config.budget_algebraic; };
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const ChartJet jet = ctx.F.jet(pt.Z);
        const PlebanskiResiduals r = plebanski_residuals(ctx.provider, pt, jet);
        o.residuals = {{"compatibility", r.compatibility}, {"descent", r.descent},
                       {"pleb1", r.pleb1},                 {"pleb2", r.pleb2},
                       {"linear_symmetry", r.linear_symmetry},
                       {"linear_pde", r.linear_pde}};
      };
    } else if (suite == "quaternion") {
      budget = [&config](const std::string&) { return config.budget_algebraic; };
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const ChartJet jet = ctx.F.jet(pt.Z);
        const TensorReport rep =
            tensor_report(ctx.provider, pt, jet, zetas, config.cond_max);
        for (const auto& [k, v] : rep.residuals) o.residuals.emplace_back(k, v);
        o.sig = signature_string(rep);
        o.tail = rep.tail_bound;
      };
    } else if (suite == "closedness") {
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const ClosednessResiduals r = closedness_residuals(ctx.F, ctx.provider, pt,
                                                           config.h_fd, config.cond_max);
        o.residuals = {{"d[om1]", r.d_om[0]},
                       {"d[om2]", r.d_om[1]},
                       {"d[om3]", r.d_om[2]},
                       {"pairing[v-sym]", r.structural[0]},
                       {"pairing[h-bracket]", r.structural[1]},
                       {"pairing[mixed-sym]", r.structural[2]},
                       {"pairing[v-bracket]", r.structural[3]}};
      };
    } else if (suite == "nijenhuis") {
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const NijenhuisResiduals r = nijenhuis_residuals(ctx.F, ctx.provider, pt,
                                                         config.h_fd, config.cond_max);
        o.residuals = {{"nijenhuis[I1]", r.by_structure[0]},
                       {"nijenhuis[I2]", r.by_structure[1]},
                       {"nijenhuis[I3]", r.by_structure[2]}};
      };
    } else if (suite == "crosscheck") {
      budget = [&config](const std::string&) { return config.budget_algebraic; };
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const ChartJet jet = ctx.F.jet(pt.Z);
        const TensorReport rep = tensor_report(ctx.provider, pt, jet, {}, config.cond_max);
        const ClosedFormTensors cf = closed_form_tensors(ctx.provider, pt, jet);
        const CrosscheckResiduals c1 = closed_form_crosscheck(rep, cf);
        const TensorReport pushed = cotangent_pushforward(rep);
        const ClosedFormTensors cfc = cotangent_closed_forms(ctx.provider, pt, jet);
        const CrosscheckResiduals c2 = closed_form_crosscheck(pushed, cfc);
        o.residuals = {{"om3", c1.om3},
                       {"omega_hol", c1.omega_hol},
                       {"cotangent[om3]", c2.om3},
                       {"cotangent[omega_hol]", c2.omega_hol}};
        o.sig = signature_string(rep);
        o.tail = std::max(rep.tail_bound, cf.tail_bound);
      };
    } else if (suite == "integrable") {
      budget = [&config](const std::string& name) {
        return name == "periodicity" ? config.budget_periodicity : config.budget_algebraic;
      };
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const ChartJet jet = ctx.F.jet(pt.Z);
        const TensorReport rep =
            tensor_report(ctx.provider, pt, jet, zetas, config.cond_max);
        const FiberChecks fc = fiber_checks(rep);
        LatticeShift shift;
        shift.up.assign(static_cast<std::size_t>(config.n), 1);
        shift.dn.assign(static_cast<std::size_t>(config.n), 1);
        const double per =
            periodicity_residual(ctx.provider, pt, jet, shift, zetas, config.cond_max);
        o.residuals = {{"lagrangian", fc.lagrangian},
                       {"polarization", fc.polarization},
                       {"projection", fc.projection},
                       {"periodicity", per}};
        o.sig = signature_string(rep);
        o.tail = rep.tail_bound;
      };
    } else if (suite == "dilog") {
      budget = [&config](const std::string&) { return config.budget_series; };
      eval = [&](const ChartPoint& pt, PointOutcome& o) {
        const ChartJet jet = ctx.F.jet(pt.Z);
        const JEval je = j_eval(ctx.provider, pt, jet);
        const std::vector<ChargeSeriesData> data =
            ctx.provider.is_zero() ? std::vector<ChargeSeriesData>{}
                                   : charge_series_data(ctx.provider, pt, jet, false);
        cx integral = 0;
        for (const ChargeSeriesData& pd : data) {
          const cx ip = ray_integral_dilog(RayIntegralSpec::standard(pd.Zg, pd.theta));
          const cx im = ray_integral_dilog(RayIntegralSpec::standard(-pd.Zg, -pd.theta));
          integral += pd.omega * (ip + im);
        }
        integral *= cx(0, -1.0 / (2.0 * kTwoPi));  // 1/(4 pi i)
        o.residuals.emplace_back("dilog", std::abs(je.value - integral));
        o.tail = je.tail_bound;
      };
    } else {
      throw ConfigError("unknown suite '" + suite + "'");
    }

    SuiteResult res = sweep(suite, ctx.points, eval, budget, report);
    report.pass = report.pass && res.pass;
    report.suites.push_back(std::move(res));
  }

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string report_to_json(const RunReport& report, const RunConfig& config) {
  json j;
  j["pass"] = report.pass;
  j["wall_time_seconds"] = report.wall_time_seconds;
  j["max_tail"] = report.max_tail;
  j["signature_census"] = report.signature_census;
  j["config"] = config_json(config);
  json suites = json::array();
  for (const SuiteResult& s : report.suites) suites.push_back(suite_json(s));
  j["suites"] = suites;
  return j.dump(2) + "\n";
}

ScanTable run_scan(const RunConfig& config, const std::string& observable) {
  const RunContext ctx = build_context(config);
  const int n = config.n;
  const int N = 4 * n;

  bool vblock = false;
  std::string tensor;
  int ia = 0, ib = 0;
  if (observable == "om3[v-block]") {
    vblock = true;
  } else {
    const std::size_t open = observable.find('[');
    const std::size_t comma = observable.find(',', open);
    const std::size_t close = observable.find(']', open);
    bool parsed = false;
    if (open != std::string::npos && comma != std::string::npos &&
        close != std::string::npos && comma < close && close == observable.size() - 1) {
      tensor = observable.substr(0, open);
      try {
        ia = std::stoi(observable.substr(open + 1, comma - open - 1));
        ib = std::stoi(observable.substr(comma + 1, close - comma - 1));
        parsed = true;
      } catch (const std::exception&) {
      }
    }
    static const std::vector<std::string> tensors = {"I1",  "I2",  "I3", "om1",
                                                     "om2", "om3", "g"};
    if (!parsed || std::find(tensors.begin(), tensors.end(), tensor) == tensors.end() ||
        ia < 0 || ia >= N || ib < 0 || ib >= N)
      throw UnknownObservable(
          "observable must be om3[v-block] or NAME[a,b] with NAME in "
          "{I1, I2, I3, om1, om2, om3, g} and 0 <= a, b < 4n; got '" +
          observable + "'");
  }

  const JoyceProvider zero = JoyceProvider::zero(n);
  auto entry_of = [&](const TensorReport& rep) -> double {
    const MatrixXd* M = nullptr;
    if (tensor == "I1") M = &rep.I1;
    if (tensor == "I2") M = &rep.I2;
    if (tensor == "I3") M = &rep.I3;
    if (tensor == "om1") M = &rep.om1;
    if (tensor == "om2") M = &rep.om2;
    if (tensor == "om3") M = &rep.om3;
    if (tensor == "g") M = &rep.g;
    return (*M)(ia, ib);
  };

  ScanTable table;
  for (int i = 0; i < n; ++i) table.header.push_back("re_Z" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) table.header.push_back("im_Z" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) table.header.push_back("phi_up" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) table.header.push_back("phi_dn" + std::to_string(i + 1));
  table.header.insert(table.header.end(), {"value", "semiflat", "difference"});

  const int count = static_cast<int>(ctx.points.size());
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(count));
  std::vector<char> ok(static_cast<std::size_t>(count), 0);
  parallel_for(count, [&](int p) {
    const ChartPoint& pt = ctx.points[static_cast<std::size_t>(p)];
    try {
      const ChartJet jet = ctx.F.jet(pt.Z);
      double value = 0.0, semiflat = 0.0, difference = 0.0;
      if (vblock) {
        const JetTable T = j_partials(ctx.provider, pt, jet, 2);
        const FrameAtPoint fr = frame_hv(ctx.provider, jet, T, config.cond_max);
        const MatrixXcd W = fiber_pairing(fr);
        const MatrixXcd semi = cx(0, 0.5) * jet.tau.imag().cast<cx>();
        value = W.cwiseAbs().maxCoeff();
        semiflat = semi.cwiseAbs().maxCoeff();
        difference = (W - semi).cwiseAbs().maxCoeff();
      } else {
        const TensorReport rep = tensor_report(ctx.provider, pt, jet, {}, config.cond_max);
        const TensorReport rep0 = tensor_report(zero, pt, jet, {}, config.cond_max);
        value = entry_of(rep);
        semiflat = entry_of(rep0);
        difference = value - semiflat;
      }
      std::vector<double>& row = rows[static_cast<std::size_t>(p)];
      for (int i = 0; i < n; ++i) row.push_back(pt.Z(i).real());
      for (int i = 0; i < n; ++i) row.push_back(pt.Z(i).imag());
      for (int i = 0; i < n; ++i) row.push_back(pt.phi_up(i));
      for (int i = 0; i < n; ++i) row.push_back(pt.phi_dn(i));
      row.insert(row.end(), {value, semiflat, difference});
      ok[static_cast<std::size_t>(p)] = 1;
    } catch (const DomainError&) {
    } catch (const NonInvertibleImTau&) {
    } catch (const DegenerateFrame&) {
    } catch (const SupportViolation&) {
    }
  });
  for (int p = 0; p < count; ++p) {
    if (ok[static_cast<std::size_t>(p)])
      table.rows.push_back(std::move(rows[static_cast<std::size_t>(p)]));
  }
  return table;
}

std::string scan_to_csv(const ScanTable& table) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < table.header.size(); ++i)
    os << (i ? "," : "") << table.header[i];
  os << "\n";
  for (const std::vector<double>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

CrosscheckReport run_crosscheck(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunContext ctx = build_context(config);
  if (ctx.provider.is_zero()) throw ConfigError("crosscheck requires charge data");

  const int count = static_cast<int>(ctx.points.size());
  std::vector<std::vector<CrosscheckRow>> rows(static_cast<std::size_t>(count));
  std::vector<std::string> skips(static_cast<std::size_t>(count));
  parallel_for(count, [&](int p) {
    const ChartPoint& pt = ctx.points[static_cast<std::size_t>(p)];
    try {
      const ChartJet jet = ctx.F.jet(pt.Z);
      const auto data = charge_series_data(ctx.provider, pt, jet, false);
      for (const ChargeSeriesData& pd : data) {
        double acc = 0.0;
        for (int m = 1; m <= pd.n_max; ++m)
          acc += 2.0 * std::cos(m * pd.theta) * bessel_k0(kTwoPi * m * pd.r) /
                 (static_cast<double>(m) * m);
        const cx series = cx(0, -1.0 / kTwoPi) * pd.omega * acc;
        const cx ip = ray_integral_dilog(RayIntegralSpec::standard(pd.Zg, pd.theta));
        const cx im = ray_integral_dilog(RayIntegralSpec::standard(-pd.Zg, -pd.theta));
        const cx integral = cx(0, -1.0 / (2.0 * kTwoPi)) * pd.omega * (ip + im);

        CrosscheckRow row;
        std::ostringstream ch;
        ch << "k=[";
        for (std::size_t i = 0; i < pd.k->size(); ++i)
          ch << (i ? "," : "") << (*pd.k)[i];
        ch << "]";
        row.charge = ch.str();
        row.point = format_point(pt);
        row.series_im = series.imag();
        row.integral_im = integral.imag();
        row.abs_error = std::abs(series - integral);
        rows[static_cast<std::size_t>(p)].push_back(std::move(row));
      }
    } catch (const DomainError& e) {
      skips[static_cast<std::size_t>(p)] = format_point(pt) + ": skipped: DomainError: " + e.what();
    } catch (const NonInvertibleImTau& e) {
      skips[static_cast<std::size_t>(p)] =
          format_point(pt) + ": skipped: NonInvertibleImTau: " + e.what();
    } catch (const SupportViolation& e) {
      skips[static_cast<std::size_t>(p)] =
          format_point(pt) + ": skipped: SupportViolation: " + e.what();
    }
  });

  CrosscheckReport report;
  for (int p = 0; p < count; ++p) {
    if (!skips[static_cast<std::size_t>(p)].empty()) {
      report.skipped_points.push_back(std::move(skips[static_cast<std::size_t>(p)]));
      continue;
    }
    for (CrosscheckRow& row : rows[static_cast<std::size_t>(p)]) {
      report.max_error = std::max(report.max_error, row.abs_error);
      report.rows.push_back(std::move(row));
    }
  }
  report.pass = report.max_error <= config.budget_series;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string crosscheck_to_json(const CrosscheckReport& report, const RunConfig& config) {
  json j;
  j["pass"] = report.pass;
  j["max_error"] = report.max_error;
  j["budget"] = config.budget_series;
  j["wall_time_seconds"] = report.wall_time_seconds;
  j["config"] = config_json(config);
  j["skipped_points"] = report.skipped_points;
  json rows = json::array();
  for (const CrosscheckRow& row : report.rows) {
    json r;
    r["charge"] = row.charge;
    r["point"] = row.point;
    r["series_im"] = row.series_im;
    r["integral_im"] = row.integral_im;
    r["abs_error"] = row.abs_error;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string catalog_listing() {
  std::ostringstream os;
  os << "Built-in prepotentials:\n"
     << "  quadratic   any n    params: c (n*n complex entries, row-major;\n"
     << "                       default i*Id).  F = (1/2) c_ij Z^i Z^j\n"
     << "  cubic       n = 1    no params.      F = Z^3 / 6\n"
     << "  ov-log      n = 1    params: Lambda (real > 0, default 10),\n"
     << "                       tau0 (default i).\n"
     << "                       F = -(i/4pi) Z^2 (log(Z/Lambda) - 3/2)\n"
     << "                           + (tau0/2) Z^2\n"
     << "\n"
     << "Config skeleton:\n"
     << "  [prepotential]\n"
     << "  name = \"ov-log\"          # or: expression = \"(1/2)*Z1^2\"\n"
     << "  n = 1\n"
     << "\n"
     << "  [prepotential.params]     # catalog parameters, optional\n"
     << "  Lambda = 10\n"
     << "\n"
     << "  [[charges]]               # optional; omit for zero corrections\n"
     << "  m = [0]\n"
     << "  k = [1]\n"
     << "  omega = \"1\"\n"
     << "\n"
     << "  [grid]\n"
     << "  re_min = -0.4\n"
     << "  re_max = 0.4\n"
     << "  im_min = 0.8\n"
     << "  im_max = 2.0\n"
     << "  re_count = 3              # default 3\n"
     << "  im_count = 3              # default 3\n"
     << "  fiber_count = 2           # default 2; sample 0 is angle zero\n"
     << "\n"
     << "  [tolerances]              # all optional, defaults shown\n"
     << "  tail_tol = 1e-12\n"
     << "  h_fd = 1e-4\n"
     << "  cond_max = 1e6\n"
     << "  support_floor = 1e-6\n"
     << "  budget_algebraic = 1e-10\n"
     << "  budget_fd = 1e-5\n"
     << "  budget_series = 1e-9\n"
     << "  budget_periodicity = 1e-12\n"
     << "\n"
     << "  [run]\n"
     << "  seed = 1\n"
     << "  suites = [\"flatness\", \"plebanski\", \"quaternion\", \"closedness\",\n"
     << "            \"nijenhuis\", \"crosscheck\", \"integrable\", \"dilog\"]\n"
     << "  zeta_samples = [\"1\", \"i\", \"-1\", \"-i\", \"2\", \"0.5+0.5i\"]\n";
  return os.str();
}

}  // namespace hkt
