// fit.cpp — Levenberg-Marquardt driver (MINPACK port in Eigen) and the line-shape fits

#include "wgheat/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <unsupported/Eigen/NonLinearOptimization>

#include "wgheat/analytic.hpp"
#include "wgheat/errors.hpp"
#include "wgheat/units.hpp"

namespace wgheat::fit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const Param& FitResult::param(const std::string& name) const {
    for (const auto& p : params)
        if (p.name == name) return p;
    throw DomainError("fit result has no parameter " + name);
}

bool FitResult::flagged(const std::string& flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

namespace {

constexpr double hbar_2pi = units::hbar * units::two_pi; // h, J s

struct Functor {
    const ResidualFn& f;
    VectorXd step;
    int m, n;

    int inputs() const { return n; }
    int values() const { return m; }

    int operator()(const VectorXd& x, VectorXd& fvec) const {
        fvec = f(x);
        return fvec.allFinite() ? 0 : -1;
    }

    // Central differences with steps tied to the parameter scale.
    int df(const VectorXd& x, MatrixXd& jac) const {
        jac.resize(m, n);
        VectorXd xp = x;
        for (int j = 0; j < n; ++j) {
            const double h = step(j);
            xp(j) = x(j) + h;
            const VectorXd up = f(xp);
            xp(j) = x(j) - h;
            const VectorXd dn = f(xp);
            xp(j) = x(j);
            jac.col(j) = (up - dn) / (2.0 * h);
        }
        return jac.allFinite() ? 0 : -1;
    }
};

MatrixXd jacobian(const Functor& fn, const VectorXd& x) {
    MatrixXd j;
    fn.df(x, j);
    return j;
}

// Residuals divided by the optional per-point sigmas.
VectorXd weighted(VectorXd r, const Weights& sigma) {
    if (sigma.empty()) return r;
    for (Eigen::Index k = 0; k < r.size(); ++k) r(k) /= sigma[static_cast<std::size_t>(k)];
    return r;
}

void check_weights(const Weights& sigma, std::size_t n) {
    if (sigma.empty()) return;
    if (sigma.size() != n) throw DomainError("sigma column length differs from data length");
    for (double s : sigma)
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("per-point sigmas must be positive");
}

} // namespace

FitResult least_squares(const ResidualFn& residuals, VectorXd p, const VectorXd& scale,
                        const std::vector<std::string>& names, const LeastSquaresOptions& opt) {
    const int n = static_cast<int>(p.size());
    if (static_cast<int>(names.size()) != n || scale.size() != n)
        throw DomainError("least_squares: names, scale and p0 sizes differ");
    const VectorXd r0 = residuals(p);
    const int m = static_cast<int>(r0.size());
    if (m < n) throw DomainError("least_squares: fewer residuals than parameters");
    if (!r0.allFinite()) throw NumericalError("least_squares: non-finite residuals at the initial guess");

    // The optimizer works on u = p / typical so Jacobian columns are
    // commensurate; MINPACK's pivoted QR drops columns that are tiny in
    // absolute terms (line amplitudes are ~1e-24 W/Hz).
    VectorXd typical(n);
    for (int c = 0; c < n; ++c) {
        typical(c) = std::max(std::abs(p(c)), std::abs(scale(c)));
        if (!(typical(c) > 0.0)) typical(c) = 1.0;
    }
    const ResidualFn scaled = [&](const VectorXd& u) { return residuals(typical.cwiseProduct(u)); };
    VectorXd u = p.cwiseQuotient(typical);
    Functor fn{scaled, VectorXd(n), m, n};
    for (int c = 0; c < n; ++c) fn.step(c) = 1e-6 * std::max(std::abs(u(c)), 1.0);

    FitResult out;
    using LM = Eigen::LevenbergMarquardt<Functor, double>;
    LM lm(fn);
    lm.parameters.ftol = opt.cost_tol;
    lm.parameters.gtol = opt.grad_tol;
    lm.parameters.xtol = 1e-15;
    lm.parameters.maxfev = 100000;
    auto status = Eigen::LevenbergMarquardtSpace::Running;
    if (r0.squaredNorm() == 0.0) {
        status = Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall;
    } else {
        status = lm.minimizeInit(u);
        if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
            throw NumericalError("least_squares: improper input parameters");
        // minimizeInit reports NotStarted on success.
        status = Eigen::LevenbergMarquardtSpace::Running;
        while (status == Eigen::LevenbergMarquardtSpace::Running && lm.iter <= opt.max_iterations)
            status = lm.minimizeOneStep(u);
    }
    out.iterations = static_cast<int>(lm.iter);

    using namespace Eigen::LevenbergMarquardtSpace;
    switch (status) {
    case RelativeReductionTooSmall:
    case RelativeErrorTooSmall:
    case RelativeErrorAndReductionTooSmall:
    case CosinusTooSmall:
    case FtolTooSmall:
    case XtolTooSmall:
    case GtolTooSmall: out.converged = true; break;
    case Running:
        out.message = "no convergence after " + std::to_string(opt.max_iterations) + " iterations";
        break;
    case UserAsked: out.message = "non-finite residuals during the search"; break;
    default: out.message = "optimizer stopped with status " + std::to_string(static_cast<int>(status));
    }

    p = typical.cwiseProduct(u);
    const VectorXd r = residuals(p);
    const MatrixXd js = jacobian(fn, u); // d r / d u
    out.residual_rms = std::sqrt(r.squaredNorm() / m);

    const double rn = r.norm();
    out.gradient_norm = 0.0;
    if (rn > 0.0)
        for (int c = 0; c < n; ++c) {
            const double cn = js.col(c).norm();
            if (cn > 0.0) out.gradient_norm = std::max(out.gradient_norm, std::abs(js.col(c).dot(r)) / (cn * rn));
        }

    // Conditioning and covariance in the scaled parameters.
    const Eigen::JacobiSVD<MatrixXd> svd(js, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    out.condition_number = s(n - 1) > 0.0 ? s(0) / s(n - 1) : std::numeric_limits<double>::infinity();

    // Covariance D (Js^T Js)^+ D s^2 through the SVD of the scaled Jacobian Js.
    VectorXd inv2 = VectorXd::Zero(n);
    for (int c = 0; c < n; ++c)
        if (s(c) > 1e-14 * s(0)) inv2(c) = 1.0 / (s(c) * s(c));
    const double var = m > n ? r.squaredNorm() / (m - n) : 0.0;
    const MatrixXd vs = typical.asDiagonal() * svd.matrixV();
    out.covariance = vs * inv2.asDiagonal() * vs.transpose() * var;

    out.n_free = static_cast<std::size_t>(n);
    for (int c = 0; c < n; ++c)
        out.params.push_back({names[static_cast<std::size_t>(c)], p(c), std::sqrt(std::max(0.0, out.covariance(c, c)))});
    return out;
}

namespace {

struct LineData {
    VectorXd x; // offset from the reference frequency, Hz
    VectorXd y;
    VectorXd ys; // smoothed copy for the heuristics
    double f_ref{0.0};
    double spacing{0.0};
    Eigen::Index kmax{0};
    double hwhm0{0.0};
};

double median_spacing(const std::vector<double>& f) {
    std::vector<double> d;
    for (std::size_t k = 1; k < f.size(); ++k) d.push_back(f[k] - f[k - 1]);
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

// Half width at half maximum around index k from linear interpolation of the
// half-max crossings. Falls back to one tenth of the span.
double half_width(const VectorXd& x, const VectorXd& y, Eigen::Index k) {
    const double half = y(k) / 2.0;
    if (!(y(k) > 0.0)) return (x(x.size() - 1) - x(0)) / 10.0;
    double left = -1.0, right = -1.0;
    for (Eigen::Index i = k; i > 0; --i)
        if (y(i - 1) < half) {
            left = x(k) - (x(i - 1) + (half - y(i - 1)) / (y(i) - y(i - 1)) * (x(i) - x(i - 1)));
            break;
        }
    for (Eigen::Index i = k; i + 1 < x.size(); ++i)
        if (y(i + 1) < half) {
            right = (x(i) + (y(i) - half) / (y(i) - y(i + 1)) * (x(i + 1) - x(i))) - x(k);
            break;
        }
    if (left > 0.0 && right > 0.0) return (left + right) / 2.0;
    if (left > 0.0) return left;
    if (right > 0.0) return right;
    return (x(x.size() - 1) - x(0)) / 10.0;
}

VectorXd smoothed(const VectorXd& y) {
    const Eigen::Index n = y.size();
    const Eigen::Index h = n / 200; // half window
    if (h == 0) return y;
    VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index a = std::max<Eigen::Index>(0, k - h), b = std::min(n - 1, k + h);
        out(k) = y.segment(a, b - a + 1).mean();
    }
    return out;
}

LineData prepare(const Spectrum& spec, const Weights& sigma) {
    spec.validate();
    if (spec.convention != PsdConvention::per_hz)
        throw DomainError("line fits expect the per-Hz (2 pi S) convention");
    if (spec.size() < 8) throw DomainError("line fits need at least 8 points");
    check_weights(sigma, spec.size());
    LineData d;
    const auto n = static_cast<Eigen::Index>(spec.size());
    d.y = Eigen::Map<const VectorXd>(spec.values.data(), n);
    // Heuristics run on a boxcar-smoothed copy so noise spikes do not set the guesses.
    d.ys = smoothed(d.y);
    d.ys.maxCoeff(&d.kmax);
    d.f_ref = spec.freqs_hz[static_cast<std::size_t>(d.kmax)];
    d.x = Eigen::Map<const VectorXd>(spec.freqs_hz.data(), n).array() - d.f_ref;
    d.spacing = median_spacing(spec.freqs_hz);
    d.hwhm0 = half_width(d.x, d.ys, d.kmax);
    if (d.ys(d.kmax) > 0.0 && 2.0 * d.hwhm0 < 8.0 * d.spacing)
        throw DomainError("peak not resolvable: fewer than 8 points per FWHM");
    return d;
}

double lorentz_hz(double x, double w) { return 1.0 / (x * x + w * w); }

void finish_center(FitResult& r, const std::string& name, double f_ref) {
    for (auto& p : r.params)
        if (p.name == name) p.value += f_ref;
}

// Thermal and Mollow lines share the form hbar 2 pi c * a * gamma / (x^2 + gamma^2).
FitResult fit_line(const Spectrum& spec, const Weights& sigma, double shape_factor,
                   const std::string& amp_name) {
    const LineData d = prepare(spec, sigma);
    const double peak = d.ys(d.kmax);
    const double energy0 = hbar_2pi * d.f_ref;
    // peak = energy * shape_factor * a / gamma
    const double a0 = peak * d.hwhm0 / (energy0 * shape_factor);
    auto model = [&](const VectorXd& p) {
        const double energy = hbar_2pi * (d.f_ref + p(2));
        VectorXd m(d.x.size());
        for (Eigen::Index k = 0; k < d.x.size(); ++k)
            m(k) = energy * shape_factor * p(0) * p(1) * lorentz_hz(d.x(k) - p(2), p(1));
        return m;
    };
    auto res = [&](const VectorXd& p) { return weighted(model(p) - d.y, sigma); };
    VectorXd p0(3);
    p0 << a0, d.hwhm0, 0.0;
    VectorXd scale(3);
    scale << (a0 != 0.0 ? std::abs(a0) : 1.0), d.hwhm0, d.hwhm0;
    FitResult r = least_squares(res, p0, scale, {amp_name, "gamma2_hz", "center_hz"});
    if (r.params[1].value < 0.0) {
        // (a, -gamma) gives the same curve as (-a, gamma).
        r.params[1].value = -r.params[1].value;
        r.params[0].value = -r.params[0].value;
        r.covariance.row(0) *= -1.0;
        r.covariance.col(0) *= -1.0;
        r.covariance.row(1) *= -1.0;
        r.covariance.col(1) *= -1.0;
    }
    finish_center(r, "center_hz", d.f_ref);
    return r;
}

} // namespace

FitResult fit_lorentzian(const Spectrum& spec, int n_peaks, const Weights& sigma, bool baseline) {
    if (n_peaks != 1 && n_peaks != 2) throw DomainError("fit_lorentzian supports 1 or 2 peaks");
    const LineData d = prepare(spec, sigma);
    const Eigen::Index n = d.x.size();

    const int np = 3 * n_peaks + (baseline ? 1 : 0);
    VectorXd p0(np), scale(np);
    p0.head(3) << 0.0, d.hwhm0, d.ys(d.kmax);
    if (n_peaks == 2) {
        // Second peak: the highest local maximum at least two widths away.
        Eigen::Index best = -1;
        for (Eigen::Index k = 1; k + 1 < n; ++k) {
            if (std::abs(d.x(k)) < 2.0 * d.hwhm0) continue;
            if (d.ys(k) >= d.ys(k - 1) && d.ys(k) >= d.ys(k + 1) && (best < 0 || d.ys(k) > d.ys(best))) best = k;
        }
        if (best < 0 || !(d.ys(best) > 0.0)) throw DomainError("second peak not resolvable");
        const double w2 = half_width(d.x, d.ys, best);
        const double w = std::min({d.hwhm0, w2, std::abs(d.x(best)) / 2.0});
        p0.head(3) << 0.0, w, d.ys(d.kmax);
        p0.segment(3, 3) << d.x(best), w, d.ys(best);
    }
    for (int q = 0; q < n_peaks; ++q) {
        const double a = std::abs(p0(3 * q + 2));
        scale.segment(3 * q, 3) << p0(1), p0(1), a > 0.0 ? a : 1.0;
    }
    if (baseline) {
        p0(np - 1) = std::min(d.ys(0), d.ys(n - 1));
        scale(np - 1) = std::max(std::abs(scale(2)), std::abs(p0(np - 1)));
    }

    auto res = [&](const VectorXd& p) {
        VectorXd m = VectorXd::Constant(n, baseline ? p(np - 1) : 0.0);
        for (int q = 0; q < n_peaks; ++q) {
            const double c = p(3 * q), w = p(3 * q + 1), a = p(3 * q + 2);
            for (Eigen::Index k = 0; k < n; ++k) m(k) += a * w * w * lorentz_hz(d.x(k) - c, w);
        }
        return weighted(m - d.y, sigma);
    };
    std::vector<std::string> names{"center_hz", "hwhm_hz", "amplitude"};
    if (n_peaks == 2) names.insert(names.end(), {"center_hz_2", "hwhm_hz_2", "amplitude_2"});
    if (baseline) names.push_back("baseline");
    FitResult r = least_squares(res, p0, scale, names);
    for (auto& p : r.params)
        if (p.name.rfind("hwhm_hz", 0) == 0) p.value = std::abs(p.value);
    finish_center(r, "center_hz", d.f_ref);
    finish_center(r, "center_hz_2", d.f_ref);
    if (n_peaks == 2 && r.value("center_hz_2") < r.value("center_hz")) {
        // Report peaks in ascending frequency.
        for (int k = 0; k < 3; ++k) {
            std::swap(r.params[static_cast<std::size_t>(k)].value, r.params[static_cast<std::size_t>(k + 3)].value);
            std::swap(r.params[static_cast<std::size_t>(k)].sigma, r.params[static_cast<std::size_t>(k + 3)].sigma);
        }
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(np);
        for (int k = 0; k < np; ++k) perm.indices()(k) = k < 3 ? k + 3 : (k < 6 ? k - 3 : k);
        r.covariance = perm * r.covariance * perm.transpose();
    }
    return r;
}

FitResult fit_thermal(const Spectrum& spec, const Weights& sigma) {
    FitResult r = fit_line(spec, sigma, 2.0, "coefficient_hz");
    // integral over f of hbar 2 pi c 2 k gamma / (x^2 + gamma^2) = h c 2 pi k
    const double c = r.value("center_hz");
    const double k = r.value("coefficient_hz");
    const double scale = hbar_2pi * c * units::two_pi;
    r.params.push_back({"integrated_power_w", scale * k, scale * r.sigma("coefficient_hz")});
    return r;
}

FitResult fit_mollow(const Spectrum& spec, const Weights& sigma) {
    return fit_line(spec, sigma, 0.5, "gamma_r_hz");
}

double power_loss_model(double rabi_hz, double gamma_n_hz, double delta_n, const PowerLossFixed& fx) {
    const double g2 = fx.gamma2_hz, gr = fx.gamma_r_hz;
    const double g1 = fx.numerator_hz ? gr * (gr + gamma_n_hz) / *fx.numerator_hz : 2.0 * g2;
    const double o2 = rabi_hz * rabi_hz;
    // In Hz units the ratio is unchanged; the prefactor carries 2 pi once.
    return hbar_2pi * fx.omega01_hz * units::two_pi * gamma_n_hz / 2.0 * (o2 - 2.0 * g2 * gr * delta_n)
           / (o2 + g2 * g1);
}

FitResult fit_power_loss(const std::vector<PowerLossPoint>& pts, const PowerLossFixed& fx,
                         const Weights& sigma) {
    if (pts.size() < 5) throw DomainError("power-loss fit needs at least 5 points");
    if (!(fx.gamma2_hz > 0.0) || !(fx.gamma_r_hz > 0.0) || !(fx.omega01_hz > 0.0))
        throw DomainError("power-loss fit needs positive gamma_2, gamma_r and omega01");
    if (fx.numerator_hz && !(*fx.numerator_hz > 0.0))
        throw DomainError("power-loss fit needs a positive reflection numerator");
    check_weights(sigma, pts.size());

    auto lo = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.rabi_hz < b.rabi_hz; });
    auto hi = std::max_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.rabi_hz < b.rabi_hz; });
    const double unit = hbar_2pi * fx.omega01_hz * units::two_pi / 2.0; // P per Hz of gamma_n at saturation
    double gn0 = hi->watts > 0.0 ? hi->watts / unit : fx.gamma_r_hz / 4.0;
    const double g1_0 = fx.numerator_hz ? fx.gamma_r_hz * (fx.gamma_r_hz + gn0) / *fx.numerator_hz
                                        : 2.0 * fx.gamma2_hz;
    // Invert the model at the weakest drive for dn.
    const double o2 = lo->rabi_hz * lo->rabi_hz;
    double dn0 = (o2 - lo->watts * (o2 + fx.gamma2_hz * g1_0) / (unit * gn0)) / (2.0 * fx.gamma2_hz * fx.gamma_r_hz);
    if (!std::isfinite(dn0)) dn0 = 0.0;

    auto resid_for = [&](const PowerLossFixed& f) {
        return [&pts, &sigma, f](const VectorXd& p) {
            VectorXd r(static_cast<Eigen::Index>(pts.size()));
            for (std::size_t k = 0; k < pts.size(); ++k)
                r(static_cast<Eigen::Index>(k)) = power_loss_model(pts[k].rabi_hz, p(0), p(1), f) - pts[k].watts;
            return weighted(r, sigma);
        };
    };
    VectorXd p0(2), scale(2);
    p0 << gn0, dn0;
    scale << std::max(gn0, 1.0), std::max(std::abs(dn0), 0.01);
    FitResult r = least_squares(resid_for(fx), p0, scale, {"gamma_n_hz", "delta_n"});

    VectorXd p(2);
    p << r.params[0].value, r.params[1].value;
    const MatrixXd j = [&] {
        Functor fn{resid_for(fx), VectorXd(2), static_cast<int>(pts.size()), 2};
        fn.step << 1e-6 * std::max(std::abs(p(0)), scale(0)), 1e-6 * std::max(std::abs(p(1)), scale(1));
        return jacobian(fn, p);
    }();

    // Uncertainty of the fixed inputs: dp = -(J^T J)^-1 J^T J_f df.
    const Eigen::Vector3d sig_f(fx.gamma2_sigma_hz, fx.gamma_r_sigma_hz,
                                fx.numerator_hz ? fx.numerator_sigma_hz : 0.0);
    if ((sig_f.array() > 0.0).any()) {
        const MatrixXd jtj_inv = (j.transpose() * j).completeOrthogonalDecomposition().pseudoInverse();
        MatrixXd g = MatrixXd::Zero(2, 3);
        for (int q = 0; q < 3; ++q) {
            if (!(sig_f(q) > 0.0)) continue;
            auto shifted = [&](double h) {
                PowerLossFixed f = fx;
                if (q == 0) f.gamma2_hz += h;
                if (q == 1) f.gamma_r_hz += h;
                if (q == 2) *f.numerator_hz += h;
                return resid_for(f)(p);
            };
            const double h = 1e-4 * sig_f(q);
            const VectorXd jf = (shifted(h) - shifted(-h)) / (2.0 * h);
            g.col(q) = -jtj_inv * (j.transpose() * jf);
        }
        Eigen::Matrix3d cf = sig_f.cwiseAbs2().asDiagonal();
        cf(0, 1) = cf(1, 0) = fx.gamma2_gamma_r_correlation * sig_f(0) * sig_f(1);
        r.covariance += g * cf * g.transpose();
        for (int c = 0; c < 2; ++c) r.params[static_cast<std::size_t>(c)].sigma = std::sqrt(r.covariance(c, c));
    }

    const bool any_pos = std::any_of(pts.begin(), pts.end(), [](auto& q) { return q.watts > 0.0; });
    const bool any_neg = std::any_of(pts.begin(), pts.end(), [](auto& q) { return q.watts < 0.0; });
    if (!(any_pos && any_neg) || r.condition_number > 1e10) r.flags.push_back("ill_conditioned");
    const double sens_dn = j.col(1).norm() * scale(1);
    const double sens_gn = j.col(0).norm() * std::max(std::abs(p(0)), scale(0));
    if (!(sens_gn > 0.0) || sens_dn < 1e-3 * sens_gn) r.flags.push_back("delta_n_unidentifiable");
    return r;
}

cplx reflection_model(double delta, double a, double g, double c) {
    return 1.0 - cplx(0.0, 1.0) * a / cplx(delta - c, g);
}

FitResult fit_reflection(const std::vector<ReflectionPoint>& tr, ReflectionMode mode, const Weights& sigma) {
    if (tr.size() < 8) throw DomainError("reflection fit needs at least 8 points");
    check_weights(sigma, tr.size());
    // Guesses from 1 - r = i A / (x + i gamma): |1 - r|^2 is a Lorentzian of
    // half width gamma and height (A / gamma)^2.
    VectorXd x(static_cast<Eigen::Index>(tr.size())), y(x.size());
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (k > 0 && !(tr[k].delta_hz > tr[k - 1].delta_hz))
            throw DomainError("reflection detunings must be strictly increasing");
        x(static_cast<Eigen::Index>(k)) = tr[k].delta_hz;
        y(static_cast<Eigen::Index>(k)) = std::norm(1.0 - tr[k].r);
    }
    Eigen::Index kmax;
    y.maxCoeff(&kmax);
    const double c0 = x(kmax);
    double g0 = half_width(x, y, kmax);
    double a0 = g0 * (1.0 - tr[static_cast<std::size_t>(kmax)].r.real());
    if (!(y(kmax) > 0.0)) a0 = 0.0;

    const std::size_t n = tr.size();
    auto res = [&](const VectorXd& p) {
        VectorXd r(mode == ReflectionMode::complex ? 2 * n : n);
        for (std::size_t k = 0; k < n; ++k) {
            const cplx m = reflection_model(tr[k].delta_hz, p(0), p(1), p(2));
            const double s = sigma.empty() ? 1.0 : sigma[k];
            switch (mode) {
            case ReflectionMode::complex:
                r(static_cast<Eigen::Index>(2 * k)) = (m.real() - tr[k].r.real()) / s;
                r(static_cast<Eigen::Index>(2 * k + 1)) = (m.imag() - tr[k].r.imag()) / s;
                break;
            case ReflectionMode::magnitude:
                r(static_cast<Eigen::Index>(k)) = (std::abs(m) - std::abs(tr[k].r)) / s;
                break;
            case ReflectionMode::phase:
                r(static_cast<Eigen::Index>(k)) = std::arg(m / tr[k].r) / s;
                break;
            }
        }
        return r;
    };
    VectorXd p0(3), scale(3);
    p0 << a0, g0, c0;
    scale << std::max(std::abs(a0), g0), g0, g0;
    FitResult r = least_squares(res, p0, scale, {"numerator_hz", "gamma2_hz", "center_hz"});
    if (r.params[1].value < 0.0) {
        // Magnitude and phase are even in gamma only together with A.
        r.params[1].value = -r.params[1].value;
        r.params[0].value = -r.params[0].value;
    }
    return r;
}

Table1Record reconcile_table1(const FitResult& mollow, const FitResult& pl, const FitResult& refl,
                              double omega01_hz) {
    if (!mollow.converged || !pl.converged || !refl.converged)
        throw DomainError("reconcile_table1 needs converged fits");
    if (!(omega01_hz > 0.0)) throw DomainError("omega01 must be positive");
    Table1Record t;
    t.gamma_r_hz = mollow.value("gamma_r_hz");
    t.gamma_2_hz = mollow.value("gamma2_hz");
    t.gamma_n_hz = pl.value("gamma_n_hz");
    t.delta_n = pl.value("delta_n");
    t.numerator_hz = refl.value("numerator_hz");
    t.gamma_2_reflection_hz = refl.value("gamma2_hz");
    t.gamma_2_discrepancy_hz = t.gamma_2_reflection_hz - t.gamma_2_hz;
    if (!(t.gamma_r_hz > 0.0)) throw DomainError("reconcile_table1 needs gamma_r > 0");

    // (gamma_r, gamma_n, dn, A) -> (rho11, n_r, n_n, gamma_1)
    auto solve = [](const Eigen::Vector4d& v) {
        const double gr = v(0), gn = v(1), dn = v(2), a = v(3);
        const double rho = (1.0 - a / gr) / 2.0;
        const double nr = (rho * (gn + gr) - dn * gn * (1.0 - 2.0 * rho)) / ((gn + gr) * (1.0 - 2.0 * rho));
        const double nn = nr + dn;
        return Eigen::Vector4d(rho, nr, nn, (1.0 + 2.0 * nn) * gn + (1.0 + 2.0 * nr) * gr);
    };
    const Eigen::Vector4d v(t.gamma_r_hz, t.gamma_n_hz, t.delta_n, t.numerator_hz);
    const Eigen::Vector4d out = solve(v);
    t.rho11 = out(0);
    t.n_r = out(1);
    t.n_n = out(2);
    t.gamma_1_hz = out(3);

    // Input covariance: Mollow and reflection independent, power-loss block as fitted.
    Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
    cov(0, 0) = std::pow(mollow.sigma("gamma_r_hz"), 2);
    cov(3, 3) = std::pow(refl.sigma("numerator_hz"), 2);
    if (pl.covariance.rows() == 2) {
        cov.block<2, 2>(1, 1) = pl.covariance;
    } else {
        cov(1, 1) = std::pow(pl.sigma("gamma_n_hz"), 2);
        cov(2, 2) = std::pow(pl.sigma("delta_n"), 2);
    }
    Eigen::Matrix4d jac;
    for (int c = 0; c < 4; ++c) {
        const double h = 1e-6 * std::max(std::abs(v(c)), c == 2 ? 0.01 : 1.0);
        Eigen::Vector4d vp = v, vm = v;
        vp(c) += h;
        vm(c) -= h;
        jac.col(c) = (solve(vp) - solve(vm)) / (2.0 * h);
    }
    const Eigen::Matrix4d cout = jac * cov * jac.transpose();
    t.sigma_n_r = std::sqrt(std::max(0.0, cout(1, 1)));
    t.sigma_n_n = std::sqrt(std::max(0.0, cout(2, 2)));
    t.sigma_gamma_1_hz = std::sqrt(std::max(0.0, cout(3, 3)));

    t.gamma_phi_implied_hz = t.gamma_2_hz - t.gamma_1_hz / 2.0;
    const double s2 = mollow.sigma("gamma2_hz");
    const double comb = std::hypot(t.sigma_gamma_1_hz, 2.0 * s2);
    t.dephasing_z = comb > 0.0 ? (t.gamma_1_hz - 2.0 * t.gamma_2_hz) / comb : 0.0;

    const double w01 = units::hz_to_rad(omega01_hz);
    auto temp = [&](double n) {
        if (n < 0.0) {
            t.flags.push_back("negative_occupation");
            return 0.0;
        }
        return units::kelvin_to_mk(model::temperature_from_occupation(n, w01, model::BathStatistics::bosonic));
    };
    t.t_r_mk = temp(t.n_r);
    t.t_n_mk = temp(t.n_n);
    if (t.rho11 < 0.0 || t.rho11 >= 0.5) {
        t.flags.push_back("rho11_out_of_range");
    } else {
        t.n_q = model::effective_qubit_occupation(t.rho11);
        t.t_q_mk = temp(t.n_q);
    }
    std::sort(t.flags.begin(), t.flags.end());
    t.flags.erase(std::unique(t.flags.begin(), t.flags.end()), t.flags.end());
    return t;
}

Spectrum add_noise(const Spectrum& spec, const Noise& noise) {
    Spectrum s = spec;
    if (noise.relative == 0.0 && noise.absolute == 0.0) return s;
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (double& v : s.values) {
        const double a = g(rng), b = g(rng);
        v = v * (1.0 + noise.relative * a) + noise.absolute * b;
    }
    return s;
}

std::vector<PowerLossPoint> synth_power_loss(const std::vector<double>& rabi_hz,
                                             const model::DerivedRates& rates, double w01,
                                             const Noise& noise) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<PowerLossPoint> out;
    for (double f : rabi_hz) {
        const double p = analytic::power_loss(units::hz_to_rad(f), rates, w01);
        const double a = g(rng), b = g(rng);
        out.push_back({f, p * (1.0 + noise.relative * a) + noise.absolute * b});
    }
    return out;
}

std::vector<ReflectionPoint> synth_reflection(const std::vector<double>& delta_hz,
                                              const model::DerivedRates& rates, const Noise& noise) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<ReflectionPoint> out;
    for (double d : delta_hz) {
        const cplx r = analytic::reflection_two_level(units::hz_to_rad(d), rates);
        const double a = g(rng), b = g(rng);
        out.push_back({d, r * (1.0 + noise.relative * g(rng)) + noise.absolute * cplx(a, b)});
    }
    return out;
}

ReferenceScenario reference_scenario() {
    ReferenceScenario s;
    for (int k = -200; k <= 200; ++k) s.spectrum_offsets_hz.push_back(k * 10e3);
    // Dense through the zero crossing, sparse out to saturation.
    for (int k = 1; k <= 30; ++k) s.rabi_hz.push_back(10e3 * k);
    for (int k = 1; k <= 10; ++k) s.rabi_hz.push_back(300e3 * std::pow(10e6 / 300e3, k / 10.0));
    for (int k = -100; k <= 100; ++k) s.reflection_delta_hz.push_back(k * 10e3);
    s.mollow_noise = 0.060;
    s.thermal_noise = 0.115;
    s.power_loss_noise = 0.0;
    s.power_loss_floor = 0.05;
    s.reflection_noise = 0.13;
    return s;
}

SyntheticSet synthesize(const model::DerivedRates& rates, double w01, const ReferenceScenario& sc,
                        std::uint64_t seed, bool noiseless) {
    std::mt19937_64 master(seed);
    std::uint64_t sub[4];
    for (auto& s : sub) s = master();
    std::vector<double> grid;
    for (double f : sc.spectrum_offsets_hz) grid.push_back(w01 + units::hz_to_rad(f));

    SyntheticSet d;
    const Spectrum mollow = analytic::mollow_center_psd(grid, rates, w01, PsdConvention::per_hz);
    const Spectrum thermal = analytic::thermal_psd(grid, rates, w01, PsdConvention::per_hz);
    const double mollow_peak = analytic::mollow_center_psd_at(w01, rates, w01) * units::two_pi;
    const double thermal_peak = std::abs(analytic::thermal_psd_at(w01, rates, w01)) * units::two_pi;
    const double sat = units::photon_energy(w01) * rates.gamma_n / 2.0;
    const double k = noiseless ? 0.0 : 1.0;
    d.mollow = add_noise(mollow, {0.0, k * sc.mollow_noise * mollow_peak, sub[0]});
    d.thermal = add_noise(thermal, {0.0, k * sc.thermal_noise * thermal_peak, sub[1]});
    d.power_loss = synth_power_loss(sc.rabi_hz, rates, w01, {k * sc.power_loss_noise, k * sc.power_loss_floor * sat, sub[2]});
    d.reflection = synth_reflection(sc.reflection_delta_hz, rates, {0.0, k * sc.reflection_noise, sub[3]});
    return d;
}

RoundTrip fit_all(const SyntheticSet& data, double omega01_hz) {
    RoundTrip rt;
    rt.mollow = fit_mollow(data.mollow);
    rt.thermal = fit_thermal(data.thermal);
    rt.reflection = fit_reflection(data.reflection);
    PowerLossFixed fx;
    fx.gamma2_hz = rt.mollow.value("gamma2_hz");
    fx.gamma_r_hz = rt.mollow.value("gamma_r_hz");
    fx.omega01_hz = omega01_hz;
    fx.numerator_hz = rt.reflection.value("numerator_hz");
    fx.gamma2_sigma_hz = rt.mollow.sigma("gamma2_hz");
    fx.gamma_r_sigma_hz = rt.mollow.sigma("gamma_r_hz");
    fx.numerator_sigma_hz = rt.reflection.sigma("numerator_hz");
    // Mollow parameter order: gamma_r_hz, gamma2_hz, center_hz.
    const auto& mc = rt.mollow.covariance;
    if (mc(0, 0) > 0.0 && mc(1, 1) > 0.0) fx.gamma2_gamma_r_correlation = mc(0, 1) / std::sqrt(mc(0, 0) * mc(1, 1));
    rt.power_loss = fit_power_loss(data.power_loss, fx);
    if (!rt.mollow.converged || !rt.thermal.converged || !rt.reflection.converged || !rt.power_loss.converged)
        throw NumericalError("fit_all: a fit did not converge");
    rt.table = reconcile_table1(rt.mollow, rt.power_loss, rt.reflection, omega01_hz);
    return rt;
}

} // namespace wgheat::fit
