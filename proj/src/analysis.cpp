#include "renyicf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "renyicf/special.hpp"

namespace renyicf {

const std::vector<ScaleRow>& scale_table() {
    static const std::vector<ScaleRow> table = {
        {6, 0.228818, 0.000004},    {8, 0.226102, 0.000005},    {10, 0.224743, 0.000005},
        {12, 0.223951, 0.000003},   {14, 0.223442, 0.000004},   {16, 0.223101, 0.000002},
        {18, 0.2228492, 0.0000015}, {20, 0.2226632, 0.0000013}, {24, 0.2224077, 0.0000009},
        {25, 0.2223601, 0.0000008}, {28, 0.2222431, 0.0000007}, {30, 0.2221817, 0.0000007},
        {36, 0.2220486, 0.0000005}, {40, 0.2219876, 0.0000004}, {45, 0.2219306, 0.0000003},
        {48, 0.2219037, 0.0000003}, {50, 0.2218880, 0.0000003}, {60, 0.2218292, 0.0000002},
        {72, 0.22178524, 0.00000016}, {75, 0.22177703, 0.00000015}, {90, 0.22174622, 0.00000012},
    };
    return table;
}

ScaleRow scale_lookup(int n_tauc) {
    for (const ScaleRow& r : scale_table())
        if (r.n_tauc == n_tauc) return r;
    throw std::invalid_argument("scale_lookup: N_tau,c = " + std::to_string(n_tauc) +
                                " is not tabulated (no interpolation by default)");
}

double lattice_tc(int n_tauc) {
    if (n_tauc <= 0) throw std::invalid_argument("lattice_tc: N_tau,c must be positive");
    return 1.0 / n_tauc;
}

// --- small dense linear algebra for the fitter -----------------------------

namespace {

// solve a x = b in place, Gaussian elimination with partial pivoting;
// returns false when singular
bool solve_dense(std::vector<double> a, std::vector<double> b, int n, std::vector<double>& x) {
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[best * n + col])) best = r;
        if (std::abs(a[best * n + col]) < 1e-300) return false;
        if (best != col) {
            for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[best * n + k]);
            std::swap(b[col], b[best]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (int k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return true;
}

bool invert_dense(const std::vector<double>& a, int n, std::vector<double>& inv) {
    inv.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        std::vector<double> x;
        if (!solve_dense(a, e, n, x)) return false;
        for (int r = 0; r < n; ++r) inv[r * n + col] = x[r];
    }
    return true;
}

double chi_squared(const ModelFn& model, const std::vector<DataPoint>& data, const std::vector<double>& p) {
    double c = 0.0;
    for (const DataPoint& d : data) {
        const double r = (d.y - model(d, p)) / d.err;
        c += r * r;
    }
    return c;
}

}  // namespace

FitResult lm_fit(const ModelFn& model, const std::vector<DataPoint>& data, std::vector<double> init,
                 std::vector<std::string> names, LmOptions opts) {
    const int np = static_cast<int>(init.size());
    const int nd = static_cast<int>(data.size());
    if (nd < np) throw std::invalid_argument("lm_fit: fewer points than parameters");
    for (const DataPoint& d : data)
        if (!(d.err > 0.0)) throw std::invalid_argument("lm_fit: nonpositive error bar");

    FitResult res;
    res.names = std::move(names);
    res.p = std::move(init);
    res.dof = nd - np;

    std::vector<double> p = res.p;
    double chi2 = chi_squared(model, data, p);
    double lambda = 1e-3;
    std::vector<double> jac(static_cast<std::size_t>(nd) * np);
    bool converged = false;
    int iter = 0;

    for (; iter < opts.max_iterations; ++iter) {
        // numeric Jacobian, central differences
        for (int j = 0; j < np; ++j) {
            const double h = std::max(opts.jacobian_step * std::abs(p[j]), 1e-9);
            std::vector<double> pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            for (int i = 0; i < nd; ++i)
                jac[static_cast<std::size_t>(i) * np + j] = (model(data[i], pp) - model(data[i], pm)) / (2.0 * h);
        }
        // normal equations with damping
        std::vector<double> jtj(static_cast<std::size_t>(np) * np, 0.0), jtr(np, 0.0);
        for (int i = 0; i < nd; ++i) {
            const double w = 1.0 / (data[i].err * data[i].err);
            const double r = data[i].y - model(data[i], p);
            for (int a = 0; a < np; ++a) {
                jtr[a] += w * jac[static_cast<std::size_t>(i) * np + a] * r;
                for (int b = a; b < np; ++b)
                    jtj[static_cast<std::size_t>(a) * np + b] += w * jac[static_cast<std::size_t>(i) * np + a] *
                                                                 jac[static_cast<std::size_t>(i) * np + b];
            }
        }
        for (int a = 0; a < np; ++a)
            for (int b = 0; b < a; ++b) jtj[static_cast<std::size_t>(a) * np + b] = jtj[static_cast<std::size_t>(b) * np + a];

        bool improved = false;
        for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
            std::vector<double> damped = jtj;
            for (int a = 0; a < np; ++a) {
                const double d = jtj[static_cast<std::size_t>(a) * np + a];
                damped[static_cast<std::size_t>(a) * np + a] = d + lambda * (d > 0.0 ? d : 1.0);
            }
            std::vector<double> step;
            if (solve_dense(damped, jtr, np, step)) {
                std::vector<double> trial = p;
                for (int a = 0; a < np; ++a) trial[a] += step[a];
                const double trial_chi2 = chi_squared(model, data, trial);
                if (trial_chi2 <= chi2) {
                    const double rel = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
                    p = trial;
                    chi2 = trial_chi2;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    improved = true;
                    if (rel < opts.chi2_rel_tol) converged = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!improved) {
            converged = true;  // no downhill direction left
            break;
        }
        if (converged) break;
    }

    res.p = p;
    res.chi2 = chi2;
    res.chi2_red = res.dof > 0 ? chi2 / res.dof : 0.0;
    res.iterations = iter + 1;
    res.converged = converged;
    if (!converged) res.flags.push_back("max_iterations");

    // covariance from the undamped normal matrix at the optimum
    for (int j = 0; j < np; ++j) {
        const double h = std::max(opts.jacobian_step * std::abs(p[j]), 1e-9);
        std::vector<double> pp = p, pm = p;
        pp[j] += h;
        pm[j] -= h;
        for (int i = 0; i < nd; ++i)
            jac[static_cast<std::size_t>(i) * np + j] = (model(data[i], pp) - model(data[i], pm)) / (2.0 * h);
    }
    std::vector<double> jtj(static_cast<std::size_t>(np) * np, 0.0);
    for (int i = 0; i < nd; ++i) {
        const double w = 1.0 / (data[i].err * data[i].err);
        for (int a = 0; a < np; ++a)
            for (int b = 0; b < np; ++b)
                jtj[static_cast<std::size_t>(a) * np + b] +=
                    w * jac[static_cast<std::size_t>(i) * np + a] * jac[static_cast<std::size_t>(i) * np + b];
    }
    if (invert_dense(jtj, np, res.cov)) {
        res.err.resize(np);
        for (int a = 0; a < np; ++a) res.err[a] = std::sqrt(std::max(res.cov[static_cast<std::size_t>(a) * np + a], 0.0));
    } else {
        res.cov.assign(static_cast<std::size_t>(np) * np, 0.0);
        res.err.assign(np, 0.0);
        res.flags.push_back("singular_covariance");
    }
    return res;
}

double ansatz_model(double x, double amp, double alpha) {
    const double b = 2.0 * alpha * x;
    return amp * x * bessel_k1(b);
}

void ansatz_gradient(double x, double amp, double alpha, double& d_amp, double& d_alpha) {
    const double b = 2.0 * alpha * x;
    const double k1 = bessel_k1(b);
    d_amp = x * k1;
    // K1'(z) = -K0(z) - K1(z)/z
    const double k1p = -bessel_k0(b) - k1 / b;
    d_alpha = amp * x * k1p * 2.0 * x;
}

double powerlaw_model(double x, double b, double c) { return b * std::pow(x, -c); }

void powerlaw_gradient(double x, double b, double c, double& d_b, double& d_c) {
    d_b = std::pow(x, -c);
    d_c = -b * std::log(x) * std::pow(x, -c);
}

FitResult fit_ansatz(const std::vector<DataPoint>& points, double init_amp, double init_alpha) {
    for (const DataPoint& d : points)
        if (d.x <= 0.0) throw std::invalid_argument("fit_ansatz: nonpositive abscissa");
    FitResult r = lm_fit([](const DataPoint& d, const std::vector<double>& p) { return ansatz_model(d.x, p[0], p[1]); },
                         points, {init_amp, init_alpha}, {"A", "alpha"});
    r.model = FitResult::Model::AnsatzBessel;
    return r;
}

FitResult fit_powerlaw(const std::vector<DataPoint>& points, double init_b, double init_c) {
    for (const DataPoint& d : points)
        if (d.x <= 0.0) throw std::invalid_argument("fit_powerlaw: nonpositive abscissa");
    FitResult r = lm_fit([](const DataPoint& d, const std::vector<double>& p) { return powerlaw_model(d.x, p[0], p[1]); },
                         points, {init_b, init_c}, {"B", "c"});
    r.model = FitResult::Model::PowerLaw;
    return r;
}

ThermoResult thermo_extrapolate(const std::vector<ThermoGroup>& groups) {
    ThermoResult out;
    std::vector<int> fitted;  // indices into groups
    std::vector<DataPoint> data;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].points.size() >= 3) {
            const int gi = static_cast<int>(fitted.size());
            fitted.push_back(static_cast<int>(g));
            for (DataPoint d : groups[g].points) {
                d.group = gi;
                data.push_back(d);
            }
        }
    }

    if (!fitted.empty()) {
        // parameters: [M, c_0, A_0, c_1, A_1, ...]
        std::vector<double> init(1 + 2 * fitted.size());
        std::vector<std::string> names(init.size());
        init[0] = 1.0;
        names[0] = "M";
        for (std::size_t gi = 0; gi < fitted.size(); ++gi) {
            const auto& pts = groups[fitted[gi]].points;
            // largest volume is closest to the limit, smallest sets the amplitude
            const auto [lo, hi] = std::minmax_element(
                pts.begin(), pts.end(), [](const DataPoint& a, const DataPoint& b) { return a.x < b.x; });
            const double c0 = hi->y;
            init[1 + 2 * gi] = c0;
            init[2 + 2 * gi] = lo->y - c0;
            names[1 + 2 * gi] = "c_" + groups[fitted[gi]].key;
            names[2 + 2 * gi] = "A_" + groups[fitted[gi]].key;
        }
        auto model = [](const DataPoint& d, const std::vector<double>& p) {
            return p[1 + 2 * d.group] + p[2 + 2 * d.group] * std::exp(-p[0] * d.x);
        };
        out.fit = lm_fit(model, data, init, names);
        out.fit.model = FitResult::Model::ThermoExp;
        out.mass = out.fit.p[0];
        out.mass_err = out.fit.err.empty() ? 0.0 : out.fit.err[0];
        // an exponential with negligible amplitude leaves M unconstrained
        double max_amp = 0.0;
        for (std::size_t gi = 0; gi < fitted.size(); ++gi) max_amp = std::max(max_amp, std::abs(out.fit.p[2 + 2 * gi]));
        if (max_amp < 1e-8 || out.mass_err > 10.0 * std::abs(out.mass) || out.mass_err == 0.0) {
            out.mass_constrained = false;
            out.fit.flags.push_back("M_unconstrained");
        }
    } else {
        out.mass_constrained = false;
    }

    for (std::size_t g = 0; g < groups.size(); ++g) {
        ThermoResult::Extrapolated e;
        e.key = groups[g].key;
        const auto it = std::find(fitted.begin(), fitted.end(), static_cast<int>(g));
        if (it != fitted.end()) {
            const int gi = static_cast<int>(it - fitted.begin());
            e.c = out.fit.p[1 + 2 * gi];
            e.c_err = out.fit.err.empty() ? 0.0 : out.fit.err[1 + 2 * gi];
            e.extrapolated = true;
        } else {
            // pass-through: weighted mean of whatever volumes exist
            double sw = 0.0, swy = 0.0;
            for (const DataPoint& d : groups[g].points) {
                const double w = 1.0 / (d.err * d.err);
                sw += w;
                swy += w * d.y;
            }
            e.c = swy / sw;
            e.c_err = std::sqrt(1.0 / sw);
            e.extrapolated = false;
        }
        out.groups.push_back(e);
    }
    return out;
}

namespace {

// weighted linear fit y = p0 + p1 x; returns (p0, sigma_p0)
std::pair<double, double> linear_intercept(const std::vector<double>& x, const std::vector<double>& y,
                                           const std::vector<double>& err) {
    double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / (err[i] * err[i]);
        s += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    const double det = s * sxx - sx * sx;
    const double p0 = (sxx * sy - sx * sxy) / det;
    return {p0, std::sqrt(sxx / det)};
}

}  // namespace

ContinuumResult continuum_extrapolate(const std::vector<ContinuumPoint>& points) {
    if (points.empty()) throw std::invalid_argument("continuum_extrapolate: no points");
    ContinuumResult r;
    if (points.size() == 1) {
        r.value = points[0].value_mid;
        r.backward_value = points[0].value_backward;
        r.stat_err = points[0].err;
        r.syst_err = std::abs(points[0].value_backward - points[0].value_mid);
        r.total_err = std::sqrt(r.stat_err * r.stat_err + r.syst_err * r.syst_err);
        r.extrapolated = false;
        return r;
    }
    std::vector<double> a, vb, vm, e;
    for (const ContinuumPoint& p : points) {
        a.push_back(p.a);
        vb.push_back(p.value_backward);
        vm.push_back(p.value_mid);
        e.push_back(p.err);
    }
    const auto [mid, mid_err] = linear_intercept(a, vm, e);
    const auto [back, back_err] = linear_intercept(a, vb, e);
    r.value = mid;
    r.backward_value = back;
    r.stat_err = mid_err;
    r.syst_err = std::abs(back - mid);
    r.total_err = std::sqrt(r.stat_err * r.stat_err + r.syst_err * r.syst_err);
    r.extrapolated = true;
    return r;
}

std::vector<CFunctionPoint> normalize_cfunction(std::vector<CFunctionPoint> points, double c2_cft) {
    if (!(c2_cft > 0.0)) throw std::invalid_argument("normalize_cfunction: C_2^CFT must be positive (config key analysis.c2_cft)");
    for (CFunctionPoint& p : points) {
        p.value_backward /= c2_cft;
        p.err_backward /= c2_cft;
        p.value_mid /= c2_cft;
        p.err_mid /= c2_cft;
        p.normalized = true;
    }
    return points;
}

const ReferenceTargets& reference_targets() {
    static const ReferenceTargets t{};
    return t;
}

}  // namespace renyicf
