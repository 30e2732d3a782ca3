#include "nlsg/d2n.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nlsg {

namespace {

// int_S^inf e^{ixs} s^{-p} ds by the integration-by-parts series; valid for
// |x S| >= ~8 (below that the caller treats the integrand as non-oscillatory).
cd osc_tail(double x, double S, double p) {
  const cd ix{0.0, x};
  cd sum{0.0, 0.0};
  double poch = 1.0;
  cd ixm{1.0, 0.0};
  double sp = std::pow(S, -p);
  for (int m = 0; m < 4; ++m) {
    sum += poch * sp / ixm / ix;
    poch *= (p + (double)m);
    ixm *= ix;
    sp /= S;
  }
  return -std::exp(ix * S) * sum;
}

// m_j(mu, d) = int_0^d (sigma/d)^j e^{mu sigma} dsigma, j = 0..jmax
void power_phase_moments(cd mu, double d, std::size_t jmax, std::vector<cd>& m) {
  m.resize(jmax + 1);
  const cd z = mu * d;
  if (std::abs(z) < 0.5) {
    for (std::size_t j = 0; j <= jmax; ++j) {
      cd term{1.0, 0.0}, acc{0.0, 0.0};
      for (int n = 0; n < 18; ++n) {
        acc += term / (double)(j + (std::size_t)n + 1);
        term *= z / (double)(n + 1);
      }
      m[j] = d * acc;
    }
    return;
  }
  const cd ez = std::exp(z);
  m[0] = (ez - 1.0) / mu;
  for (std::size_t j = 1; j <= jmax; ++j) m[j] = ez / mu - (double)j / z * m[j - 1];
}

constexpr std::size_t kPanelNodes = 10;  // samples per Filon panel
constexpr std::size_t kPolyDeg = 3;      // envelope polynomials sigma^0..sigma^2 x 3 phases

struct PanelRule {
  std::vector<double> rA, wA;  // smooth region, Simpson in r
  std::vector<double> sB;      // region-B node abscissas (panels share endpoints)
  std::vector<std::size_t> panel_begin;  // node index of each panel's first sample
  std::vector<double> panel_s0, panel_ds;
  std::vector<double> fit_s;  // tail-fit nodes on [Smax, 4 Smax]
  double Smax = 0.0;

  std::size_t total_nodes() const { return rA.size() + sB.size() + fit_s.size(); }
  double radius(std::size_t j) const {
    if (j < rA.size()) return rA[j];
    j -= rA.size();
    if (j < sB.size()) return std::sqrt(sB[j]);
    return std::sqrt(fit_s[j - sB.size()]);
  }
};

PanelRule build_rule(const D2NParams& p, double T) {
  PanelRule rule;
  rule.Smax = p.kmax * p.kmax;
  const double r_knee = std::sqrt(p.s_knee);

  std::size_t na = p.smooth_nodes | 1;
  const double ha = r_knee / (double)(na - 1);
  for (std::size_t j = 0; j < na; ++j) {
    rule.rA.push_back(ha * (double)j);
    const double w = (j == 0 || j + 1 == na) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    rule.wA.push_back(w * ha / 3.0);
  }

  // Filon panels on [s_knee, Smax]: widths capped by the envelope variation
  // (a fixed geometric factor) and by the per-sample phase increment at the
  // worst time, 4 T ds / (nodes-1) <= phase_cap, so the known-phase columns
  // stay well conditioned for every t in [0, T].
  const double phase_cap = 12.0 / (double)std::max<std::size_t>(p.n_per_period, 6);
  const double ds_phase = phase_cap * (double)(kPanelNodes - 1) / (4.0 * std::max(T, 1e-9));
  double s0 = p.s_knee;
  while (s0 < rule.Smax) {
    double s1 = std::min(rule.Smax, s0 + std::min(0.12 * s0, ds_phase));
    if (rule.Smax - s1 < 0.02 * (s1 - s0)) s1 = rule.Smax;
    rule.panel_begin.push_back(rule.sB.size());
    rule.panel_s0.push_back(s0);
    rule.panel_ds.push_back(s1 - s0);
    for (std::size_t j = 0; j < kPanelNodes; ++j)
      rule.sB.push_back(s0 + (s1 - s0) * (double)j / (double)(kPanelNodes - 1));
    s0 = s1;
  }

  const double q = std::pow(4.0, 1.0 / (double)(p.fit_nodes - 1));
  double s = rule.Smax;
  for (std::size_t j = 0; j < p.fit_nodes; ++j, s *= q) rule.fit_s.push_back(s);
  return rule;
}

// Integrate one panel from its sampled values: least squares on
// {1, sh, sh^2} x {1, e^{+4ist}, e^{-4ist}} (sh = sigma/ds normalized), exact
// basis integrals. Falls back to a plain quintic fit when no full oscillation
// crosses the panel.
class PanelIntegrator {
public:
  PanelIntegrator(double s0, double ds, double t) : s0_(s0), ds_(ds) {
    const double x = 4.0 * t;
    osc_ = x * ds_ > 0.6;
    std::vector<cd> m0, mp, mm;
    power_phase_moments(cd{0.0, 0.0}, ds_, osc_ ? kPolyDeg - 1 : 2 * kPolyDeg - 1, m0);
    if (osc_) {
      power_phase_moments(I1 * x, ds_, kPolyDeg - 1, mp);
      power_phase_moments(-I1 * x, ds_, kPolyDeg - 1, mm);
    }
    const std::size_t ncols = osc_ ? 3 * kPolyDeg : 2 * kPolyDeg;
    MatX A(kPanelNodes, ncols);
    ints_.resize(ncols);
    for (std::size_t n = 0; n < kPanelNodes; ++n) {
      const double sh = (double)n / (double)(kPanelNodes - 1);
      const double sigma = sh * ds_;
      for (std::size_t j = 0; j < (osc_ ? kPolyDeg : 2 * kPolyDeg); ++j) {
        A((Eigen::Index)n, (Eigen::Index)j) = std::pow(sh, (double)j);
      }
      if (osc_) {
        const cd ep = std::exp(I1 * x * sigma), em = std::exp(-I1 * x * sigma);
        for (std::size_t j = 0; j < kPolyDeg; ++j) {
          const double shj = std::pow(sh, (double)j);
          A((Eigen::Index)n, (Eigen::Index)(kPolyDeg + j)) = shj * ep;
          A((Eigen::Index)n, (Eigen::Index)(2 * kPolyDeg + j)) = shj * em;
        }
      }
    }
    for (std::size_t j = 0; j < (osc_ ? kPolyDeg : 2 * kPolyDeg); ++j) ints_[j] = m0[j];
    if (osc_)
      for (std::size_t j = 0; j < kPolyDeg; ++j) {
        ints_[kPolyDeg + j] = mp[j];
        ints_[2 * kPolyDeg + j] = mm[j];
      }
    qr_.compute(A);
  }

  cd integrate(const VecX& values) const {
    const VecX coef = qr_.solve(values);
    cd acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < coef.size(); ++j) acc += coef(j) * ints_[(std::size_t)j];
    return acc;
  }

private:
  double s0_, ds_;
  bool osc_ = false;
  std::vector<cd> ints_;
  Eigen::ColPivHouseholderQR<MatX> qr_;
};

// Everything one edge's integrand assembly needs at a single radius.
struct NodeEval {
  std::vector<cd> p1_pr, p2_pr, p1_mr, p2_mr, p1_pi, p2_pi, p1_mi, p2_mi;
  cd bar_r, bar_i;
};

enum Table { T_J1 = 0, T_J2, T_J2HALF, T_J3, T_COMBINED, T_COUNT };

class Engine {
public:
  Engine(const XSpectrum& xs, std::vector<EdgeFn> h0, double T, double g, const D2NParams& p)
      : xs_(xs), h0_(std::move(h0)), T_(T), g_(g), p_(p), rule_(build_rule(p, T)) {
    tgrid_ = uniform_points(p_.nt, 0.0, T);
    n_ = xs_.edges();
    const std::size_t m = rule_.total_nodes();
    bar_r_.assign(n_, std::vector<cd>(m));
    bar_i_.assign(n_, std::vector<cd>(m));
    parallel_for(
        m,
        [&](std::size_t j) {
          const double r = rule_.radius(j);
          for (std::size_t e = 0; e < n_; ++e) {
            const cd kr = (r == 0.0) ? cd{1e-9, 0.0} : cd{r, 0.0};
            const cd ki = (r == 0.0) ? cd{0.0, 1e-9} : cd{0.0, r};
            bar_r_[e][j] = x_ratio(e, kr);
            bar_i_[e][j] = x_ratio(e, ki);
          }
        },
        p_.threads);
  }

  const std::vector<double>& tgrid() const { return tgrid_; }

  FormIntegrals run(const std::vector<EdgeFn>& h1) const {
    FormIntegrals out;
    out.tgrid = tgrid_;
    const std::size_t nt = tgrid_.size();
    const auto zero_tables = std::vector<std::vector<cd>>(n_, std::vector<cd>(nt, cd{0.0, 0.0}));
    out.J1 = out.J2 = out.J2half = out.J3 = out.H1_formula = zero_tables;

    const std::size_t nA = rule_.rA.size();
    const std::size_t nB = rule_.sB.size();
    const std::size_t nF = rule_.fit_s.size();
    const std::size_t total = nA + nB + nF;

    // region-A partial sums per chunk (deterministic reduce) and stored values
    // for the panel/fit regions: vals[e][table][node][t]
    const std::size_t chunk = 32;
    const std::size_t nchunks = (total + chunk - 1) / chunk;
    std::vector<std::vector<std::vector<cd>>> apart(
        nchunks, std::vector<std::vector<cd>>(n_ * T_COUNT));
    std::vector<std::vector<std::vector<std::vector<cd>>>> vals(
        n_, std::vector<std::vector<std::vector<cd>>>(
                T_COUNT, std::vector<std::vector<cd>>(nB + nF, std::vector<cd>(nt))));

    parallel_for(
        nchunks,
        [&](std::size_t c) {
          for (auto& v : apart[c]) v.assign(nt, cd{0.0, 0.0});
          const std::size_t lo = c * chunk, hi = std::min(total, lo + chunk);
          NodeEval ev;
          for (std::size_t j = lo; j < hi; ++j) {
            const double r = rule_.radius(j);
            for (std::size_t e = 0; e < n_; ++e) {
              eval_node(e, j, r, h1, ev);
              for (std::size_t it = 0; it < nt; ++it) {
                std::array<cd, T_COUNT> g;
                assemble(ev, r, tgrid_[it], it, h0_[e](tgrid_[it]), g);
                if (j < nA) {
                  for (std::size_t tb = 0; tb < T_COUNT; ++tb)
                    apart[c][e * T_COUNT + tb][it] += rule_.wA[j] * g[tb];
                } else {
                  const double meas = 1.0 / (2.0 * r);  // dr = ds / (2 sqrt s)
                  for (std::size_t tb = 0; tb < T_COUNT; ++tb)
                    vals[e][tb][j - nA][it] = g[tb] * meas;
                }
              }
            }
          }
        },
        p_.threads);

    // region A
    std::vector<std::vector<std::vector<cd>>> tables(
        T_COUNT, std::vector<std::vector<cd>>(n_, std::vector<cd>(nt, cd{0.0, 0.0})));
    for (std::size_t c = 0; c < nchunks; ++c)
      for (std::size_t e = 0; e < n_; ++e)
        for (std::size_t tb = 0; tb < T_COUNT; ++tb)
          for (std::size_t it = 0; it < nt; ++it) tables[tb][e][it] += apart[c][e * T_COUNT + tb][it];

    // region B: Filon panels, one factorization per (t, panel), five tables
    parallel_for(
        nt,
        [&](std::size_t it) {
          const double t = tgrid_[it];
          VecX y(kPanelNodes);
          for (std::size_t pnl = 0; pnl < rule_.panel_begin.size(); ++pnl) {
            PanelIntegrator pint(rule_.panel_s0[pnl], rule_.panel_ds[pnl], t);
            for (std::size_t e = 0; e < n_; ++e)
              for (std::size_t tb = 0; tb < T_COUNT; ++tb) {
                for (std::size_t nn = 0; nn < kPanelNodes; ++nn)
                  y((Eigen::Index)nn) = vals[e][tb][rule_.panel_begin[pnl] + nn][it];
                tables[tb][e][it] += pint.integrate(y);
              }
          }
        },
        p_.threads);

    // tail completion beyond Smax from the fitted models
    for (std::size_t e = 0; e < n_; ++e)
      for (std::size_t it = 0; it < nt; ++it) {
        const double t = tgrid_[it];
        tables[T_J1][e][it] += fit_tail(vals[e][T_J1], nB, it, t, false);
        tables[T_J2][e][it] += fit_tail(vals[e][T_J2], nB, it, t, true);
        tables[T_J2HALF][e][it] += fit_tail(vals[e][T_J2HALF], nB, it, t, true);
        tables[T_J3][e][it] += fit_tail(vals[e][T_J3], nB, it, t, true);
        tables[T_COMBINED][e][it] += fit_tail(vals[e][T_COMBINED], nB, it, t, false);
      }

    // The representation holds for t > 0 (the Fresnel pieces carry a boundary
    // layer at the endpoint); take the t = 0 value as the right limit.
    for (std::size_t e = 0; e < n_; ++e)
      tables[T_COMBINED][e][0] =
          3.0 * tables[T_COMBINED][e][1] - 3.0 * tables[T_COMBINED][e][2] + tables[T_COMBINED][e][3];

    out.J1 = tables[T_J1];
    out.J2 = tables[T_J2];
    out.J2half = tables[T_J2HALF];
    out.J3 = tables[T_J3];
    out.H1_formula = tables[T_COMBINED];
    return out;
  }

private:
  cd x_ratio(std::size_t e, cd k) const {
    const auto r = x_scatter_edge(xs_.q[e], 0.0, xs_.L, g_, k, p_.xstepper);
    return r.top / r.bottom;  // b / a
  }

  void eval_node(std::size_t e, std::size_t j, double r, const std::vector<EdgeFn>& h1,
                 NodeEval& ev) const {
    const double rr = (r == 0.0) ? 1e-9 : r;
    const cd pr{rr, 0.0}, mr{-rr, 0.0}, pi{0.0, rr}, mi{0.0, -rr};
    t_forward_edge(h0_[e], h1[e], T_, g_, pr, p_.nt, p_.stepper, ev.p1_pr, ev.p2_pr);
    t_forward_edge(h0_[e], h1[e], T_, g_, mr, p_.nt, p_.stepper, ev.p1_mr, ev.p2_mr);
    t_forward_edge(h0_[e], h1[e], T_, g_, pi, p_.nt, p_.stepper, ev.p1_pi, ev.p2_pi);
    t_forward_edge(h0_[e], h1[e], T_, g_, mi, p_.nt, p_.stepper, ev.p1_mi, ev.p2_mi);
    ev.bar_r = bar_r_[e][j];
    ev.bar_i = bar_i_[e][j];
  }

  // Paired integrand over the two rays of the D1 boundary, oriented from
  // i inf to 0 to inf: int_{dD1} F dk = int_0^inf [F(r) - i F(ir)] dr.
  void assemble(const NodeEval& ev, double r, double t, std::size_t it, cd h0v,
                std::array<cd, T_COUNT>& g) const {
    const double rr = (r == 0.0) ? 1e-9 : r;
    const cd kr{rr, 0.0}, ki{0.0, rr};
    const cd eosc_r = std::exp(-4.0 * I1 * kr * kr * t);  // e^{-4 i r^2 t}
    const cd eosc_i = std::exp(-4.0 * I1 * ki * ki * t);  // e^{+4 i r^2 t}

    g[T_J1] = (ev.p2_pr[it] - ev.p2_mr[it]) - I1 * (ev.p2_pi[it] - ev.p2_mi[it]);
    const cd j2_real = kr * (ev.p1_pr[it] - ev.p1_mr[it]) + I1 * h0v;
    const cd j2_imag = ki * (ev.p1_pi[it] - ev.p1_mi[it]) + I1 * h0v;
    g[T_J2] = j2_real - I1 * j2_imag;
    const cd j2h_real = kr * ev.p1_pr[it] + 0.5 * I1 * h0v;
    const cd j2h_imag = ki * ev.p1_pi[it] + 0.5 * I1 * h0v;
    g[T_J2HALF] = j2h_real - I1 * j2h_imag;
    // conj(Phi2(t, conj k)): conj k = r on the real ray, -ir on the imaginary ray
    const cd j3_real = kr * eosc_r * ev.bar_r * std::conj(ev.p2_pr[it]);
    const cd j3_imag = ki * eosc_i * ev.bar_i * std::conj(ev.p2_mi[it]);
    g[T_J3] = j3_real - I1 * j3_imag;
    g[T_COMBINED] =
        2.0 / M_PI * h0v * g[T_J1] + 2.0 * I1 / M_PI * g[T_J2] + 4.0 * I1 / M_PI * g[T_J3];
  }

  // Least-squares tail models on the fit nodes:
  //   combined/J1: {s^{-3/2}, e^{+-4ist}/s}
  //   individual J2/J2half/J3: additionally e^{+-4ist}/sqrt(s)
  // Oscillatory columns require |4 t Smax| above the threshold; below it only
  // the smooth column is used (the identity checks stay above t_min).
  cd fit_tail(const std::vector<std::vector<cd>>& vals, std::size_t nB, std::size_t it, double t,
              bool with_half_power) const {
    const double S = rule_.Smax;
    const double x = 4.0 * t;
    const bool osc = x * S >= p_.fit_threshold;
    std::vector<std::function<cd(double)>> models;
    std::vector<cd> tails;
    models.push_back([](double s) { return std::pow(s, -1.5); });
    tails.push_back(cd{2.0 / std::sqrt(S), 0.0});
    if (osc) {
      models.push_back([x](double s) { return std::exp(I1 * x * s) / s; });
      tails.push_back(osc_tail(x, S, 1.0));
      models.push_back([x](double s) { return std::exp(-I1 * x * s) / s; });
      tails.push_back(osc_tail(-x, S, 1.0));
      if (with_half_power) {
        models.push_back([x](double s) { return std::exp(I1 * x * s) / std::sqrt(s); });
        tails.push_back(osc_tail(x, S, 0.5));
        models.push_back([x](double s) { return std::exp(-I1 * x * s) / std::sqrt(s); });
        tails.push_back(osc_tail(-x, S, 0.5));
      }
    }
    const std::size_t nm = models.size();
    const std::size_t nf = rule_.fit_s.size();
    MatX A((Eigen::Index)nf, (Eigen::Index)nm);
    VecX y((Eigen::Index)nf);
    for (std::size_t j = 0; j < nf; ++j) {
      for (std::size_t m = 0; m < nm; ++m)
        A((Eigen::Index)j, (Eigen::Index)m) = models[m](rule_.fit_s[j]);
      y((Eigen::Index)j) = vals[nB + j][it];
    }
    const VecX coef = A.colPivHouseholderQr().solve(y);
    cd tail{0.0, 0.0};
    for (std::size_t m = 0; m < nm; ++m) tail += coef((Eigen::Index)m) * tails[m];
    return tail;
  }

  const XSpectrum& xs_;
  std::vector<EdgeFn> h0_;
  double T_, g_;
  D2NParams p_;
  PanelRule rule_;
  std::vector<double> tgrid_;
  std::size_t n_ = 0;
  std::vector<std::vector<cd>> bar_r_, bar_i_;
};

std::vector<EdgeFn> edge_fns(const SampledFunction& f) {
  std::vector<EdgeFn> fns;
  for (std::size_t e = 0; e < f.edges(); ++e) {
    f.eval(e, f.lo());  // warm the spline before any parallel use
    fns.push_back(f.edge_fn(e));
  }
  return fns;
}

}  // namespace

FormIntegrals evaluate_form_integrals(const XSpectrum& xs, const std::vector<EdgeFn>& h0,
                                      const std::vector<EdgeFn>& h1, double T, double g,
                                      const D2NParams& params) {
  Engine eng(xs, h0, T, g, params);
  return eng.run(h1);
}

D2NState solve_neumann(const SampledFunction& Q0, const SampledFunction& H0, double T, double g,
                       const D2NParams& params, const std::optional<SampledFunction>& warm_start) {
  if (Q0.edges() != H0.edges()) throw ValidationError("solve_neumann: edge count mismatch");
  const std::size_t n = Q0.edges();
  const double scale = std::max({Q0.max_abs(), H0.max_abs(), 1e-12});
  for (std::size_t e = 0; e < n; ++e)
    if (std::abs(Q0.value(e, 0) - H0.value(e, 0)) > 1e-6 * scale)
      throw ValidationError("solve_neumann: corner condition Q0(0) = H0(0) violated on edge " +
                            std::to_string(e + 1));

  XSpectrum xs;
  xs.L = Q0.hi();
  xs.g = g;
  xs.stepper = params.xstepper;
  for (std::size_t e = 0; e < n; ++e) xs.q.push_back(Q0.edge_fn(e));

  if (params.check_a_zeros) {
    const double rbox = params.zero_box;
    const auto zs = find_zeros(xs, nullptr, SearchBox{1e-3, rbox, 1e-3, rbox});
    std::size_t in_d1 = 0;
    for (const auto& per_edge : zs.kappa)
      for (const auto& z : per_edge)
        if (z.quadrant == 1 || (z.on_boundary && z.k.imag() > 0.0)) ++in_d1;
    if (in_d1 > 0)
      throw ValidationError(
          "solve_neumann: a(k) has zeros in D1; the pole-corrected representation is not "
          "implemented");
  }

  Engine eng(xs, edge_fns(H0), T, g, params);
  const auto& tg = eng.tgrid();

  std::vector<std::vector<cd>> h1vals(n, std::vector<cd>(tg.size(), cd{0.0, 0.0}));
  if (warm_start) {
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t it = 0; it < tg.size(); ++it) h1vals[e][it] = warm_start->eval(e, tg[it]);
  }

  D2NState state;
  const double damping = (g == 0.0) ? 1.0 : params.damping;
  double h1scale = scale;
  FormIntegrals last;
  for (std::size_t iter = 0; iter < params.max_iter; ++iter) {
    SampledFunction cur(tg, h1vals, false);
    last = eng.run(edge_fns(cur));
    double update = 0.0;
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t it = 0; it < tg.size(); ++it) {
        const cd next = (1.0 - damping) * h1vals[e][it] + damping * last.H1_formula[e][it];
        update = std::max(update, std::abs(next - h1vals[e][it]));
        h1vals[e][it] = next;
        h1scale = std::max(h1scale, std::abs(next));
      }
    state.update_norms.push_back(update);
    state.iterations = iter + 1;
    if (update <= params.tol * h1scale) {
      state.converged = true;
      break;
    }
  }
  state.final_update = state.update_norms.empty() ? 0.0 : state.update_norms.back();
  if (!state.converged && g != 0.0) {
    std::string hist;
    for (double u : state.update_norms) hist += " " + std::to_string(u);
    throw NumericError("solve_neumann: fixed point did not converge; update history:" + hist);
  }

  // the last map evaluation doubles as the representation residual at the
  // converged iterate (up to one damped update)
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t it = 0; it < tg.size(); ++it)
      state.fixed_point_residual =
          std::max(state.fixed_point_residual, std::abs(last.H1_formula[e][it] - h1vals[e][it]));
  state.H1 = SampledFunction(tg, h1vals, false);
  return state;
}

BoundarySpectral spectral_from_phi(const SampledFunction& H0, const SampledFunction& H1, double T,
                                   double g, const Kgrid& kgrid, const StepperParams& stepper) {
  const std::size_t n = H0.edges();
  BoundarySpectral out;
  out.kgrid = kgrid;
  out.T = T;
  out.g = g;
  out.N = n;
  out.A.assign(kgrid.size(), DiagMat(n));
  out.B.assign(kgrid.size(), DiagMat(n));
  out.err.assign(kgrid.size(), 0.0);
  std::vector<EdgeFn> h0 = edge_fns(H0), h1 = edge_fns(H1);
  out.evaluator = TSpectrum{h0, h1, T, g, stepper};
  parallel_for(kgrid.size(), [&](std::size_t i) {
    const cd k = kgrid.points[i];
    std::vector<cd> p1, p2;
    for (std::size_t e = 0; e < n; ++e) {
      t_forward_edge(h0[e], h1[e], T, g, k, 3, stepper, p1, p2);
      out.B[i][e] = -p1.back() * std::exp(4.0 * I1 * k * k * T);
      t_forward_edge(h0[e], h1[e], T, g, std::conj(k), 3, stepper, p1, p2);
      out.A[i][e] = std::conj(p2.back());
    }
  });
  return out;
}

AsymptoticConsistency asymptotic_consistency(const SampledFunction& Q0,
                                             const SampledFunction& H0,
                                             const SampledFunction& H1, double T, double g,
                                             const D2NParams& params) {
  const std::size_t n = Q0.edges();
  AsymptoticConsistency rep;
  rep.t_min = std::max(2.0 * params.fit_threshold / (4.0 * params.kmax * params.kmax), 1e-3);

  std::vector<EdgeFn> h0 = edge_fns(H0), h1 = edge_fns(H1);

  // ray fits on arg k = 3 pi/4 (interior of D2, oscillatory modes dead)
  const cd dir = std::polar(1.0, 3.0 * M_PI / 4.0);
  const cd k1 = 0.5 * params.kmax * dir, k2 = params.kmax * dir;
  const std::size_t nt = params.nt;
  const auto tg = uniform_points(nt, 0.0, T);

  for (std::size_t e = 0; e < n; ++e) {
    std::vector<cd> p1a, p2a, p1b, p2b;
    t_forward_edge(h0[e], h1[e], T, g, k1, nt, params.stepper, p1a, p2a);
    t_forward_edge(h0[e], h1[e], T, g, k2, nt, params.stepper, p1b, p2b);
    cd acc{0.0, 0.0};
    const double dt = tg[1] - tg[0];
    for (std::size_t it = 0; it < nt; ++it) {
      const double t = tg[it];
      if (it > 0) {
        auto f = [&](double tau) {
          return std::conj(h1[e](tau)) * h0[e](tau) - std::conj(h0[e](tau)) * h1[e](tau);
        };
        acc += dt / 6.0 * (f(tg[it - 1]) + 4.0 * f(tg[it - 1] + 0.5 * dt) + f(t));
      }
      const cd phi21_quad = -0.5 * g * acc;
      const cd f1 = k1 * p1a[it], f2 = k2 * p1b[it];
      const cd c2 = (f2 - f1) / (1.0 / k2 - 1.0 / k1);
      const cd c1 = f2 - c2 / k2;
      const cd e1 = k1 * (p2a[it] - 1.0), e2 = k2 * (p2b[it] - 1.0);
      const cd d2 = (e2 - e1) / (1.0 / k2 - 1.0 / k1);
      const cd d1 = e2 - d2 / k2;
      rep.phi11_residual = std::max(rep.phi11_residual, std::abs(c1 + 0.5 * I1 * h0[e](t)));
      rep.phi21_residual = std::max(rep.phi21_residual, std::abs(d1 - phi21_quad));
      const cd h1rec = 4.0 * c2 + 2.0 * I1 * h0[e](t) * d1;
      rep.h1_recovery = std::max(rep.h1_recovery, std::abs(h1rec - h1[e](t)));
    }
    rep.c1_plus_b1 =
        std::max(rep.c1_plus_b1, std::abs(0.5 * I1 * h0[e](0.0) - 0.5 * I1 * Q0.value(e, 0)));
  }

  // contour-integral identities from the form-integral engine
  XSpectrum xs;
  xs.L = Q0.hi();
  xs.g = g;
  xs.stepper = params.xstepper;
  for (std::size_t e = 0; e < n; ++e) xs.q.push_back(Q0.edge_fn(e));
  const auto fi = evaluate_form_integrals(xs, h0, h1, T, g, params);

  for (std::size_t e = 0; e < n; ++e) {
    cd acc{0.0, 0.0};
    const double dt = tg[1] - tg[0];
    for (std::size_t it = 0; it < nt; ++it) {
      const double t = tg[it];
      if (it > 0) {
        auto f = [&](double tau) {
          return std::conj(h1[e](tau)) * h0[e](tau) - std::conj(h0[e](tau)) * h1[e](tau);
        };
        acc += dt / 6.0 * (f(tg[it - 1]) + 4.0 * f(tg[it - 1] + 0.5 * dt) + f(t));
      }
      if (t < rep.t_min) continue;
      const cd phi21 = -0.5 * g * acc;
      const cd phi12 = 0.25 * h1[e](t) - 0.5 * I1 * h0[e](t) * phi21;
      rep.p21_identity = std::max(rep.p21_identity, std::abs(I1 * M_PI * phi21 - fi.J1[e][it]));
      rep.p12_identity =
          std::max(rep.p12_identity,
                   std::abs(I1 * M_PI * phi12 - (2.0 * fi.J2half[e][it] - fi.J2[e][it])));
      rep.last_identity = std::max(
          rep.last_identity, std::abs(fi.J2half[e][it] + fi.J3[e][it] + 0.5 * I1 * M_PI * phi12));
    }
  }
  return rep;
}

}  // namespace nlsg
