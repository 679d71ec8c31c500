// welch.cpp — Windowed overlapped periodograms via FFTW and an exact
// Ornstein-Uhlenbeck surrogate

#include "wgheat/welch.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include <fftw3.h>

#include "wgheat/errors.hpp"
#include "wgheat/parallel.hpp"
#include "wgheat/units.hpp"

namespace wgheat::welch {

void TimeSeries::validate() const {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
        throw DomainError("sample rate must be positive");
    if (!(gain >= 0.0)) throw DomainError("gain must be >= 0");
    for (double v : samples)
        if (!std::isfinite(v)) throw DomainError("time series has non-finite samples");
}

double TimeSeries::variance() const {
    if (samples.empty()) return 0.0;
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    double acc = 0.0;
    for (double v : samples) acc += (v - mean) * (v - mean);
    return acc / samples.size();
}

std::vector<double> window_coefficients(Window w, std::size_t n) {
    std::vector<double> c(n, 1.0);
    if (w == Window::rectangular || n < 2) return c;
    // Periodic windows: the natural choice for spectral averaging.
    const double a0 = w == Window::hann ? 0.5 : 0.54;
    for (std::size_t k = 0; k < n; ++k)
        c[k] = a0 - (1.0 - a0) * std::cos(2.0 * M_PI * k / n);
    return c;
}

std::size_t default_segment_length(std::size_t n, double fs, double linewidth_hz) {
    if (!(linewidth_hz > 0.0)) throw DomainError("linewidth must be positive");
    const double want = 20.0 * fs / linewidth_hz;
    std::size_t seg = std::size_t{1} << static_cast<int>(std::ceil(std::log2(std::max(want, 2.0))));
    std::size_t cap = 1;
    while (cap * 2 <= n / 8) cap *= 2;
    return std::max<std::size_t>(std::min(seg, cap), 2);
}

namespace {

struct FftPlan {
    double* in;
    fftw_complex* out;
    fftw_plan plan;

    explicit FftPlan(std::size_t n)
        : in(fftw_alloc_real(n)),
          out(fftw_alloc_complex(n / 2 + 1)),
          plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE)) {}
    ~FftPlan() {
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

} // namespace

Spectrum welch_psd(const TimeSeries& ts, std::size_t seg, double overlap, Window window) {
    ts.validate();
    if (!(overlap >= 0.0 && overlap < 1.0)) throw DomainError("overlap must lie in [0, 1)");
    if (seg < 2 || seg > ts.size())
        throw DomainError("segment length must lie in [2, record length]");

    const std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(seg * (1.0 - overlap))));
    const std::size_t nseg = 1 + (ts.size() - seg) / step;
    const auto w = window_coefficients(window, seg);
    const double wpow = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

    // Segments are summed in fixed blocks so the result does not depend on
    // the thread count. fftw_execute_dft_r2c on private buffers is thread safe.
    const std::size_t nbin = seg / 2 + 1;
    constexpr std::size_t block = 64;
    const std::size_t nblock = (nseg + block - 1) / block;
    std::vector<std::vector<double>> partial(nblock, std::vector<double>(nbin, 0.0));
    FftPlan fft(seg);
    parallel_for(nblock, [&](std::size_t b) {
        double* in = fftw_alloc_real(seg);
        fftw_complex* out = fftw_alloc_complex(nbin);
        auto& acc = partial[b];
        for (std::size_t s = b * block; s < std::min(nseg, (b + 1) * block); ++s) {
            const double* x = ts.samples.data() + s * step;
            const double mean = std::accumulate(x, x + seg, 0.0) / seg;
            for (std::size_t k = 0; k < seg; ++k) in[k] = (x[k] - mean) * w[k];
            fftw_execute_dft_r2c(fft.plan, in, out);
            for (std::size_t k = 0; k < nbin; ++k) acc[k] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
        }
        fftw_free(in);
        fftw_free(out);
    });
    std::vector<double> acc(nbin, 0.0);
    for (const auto& p : partial)
        for (std::size_t k = 0; k < nbin; ++k) acc[k] += p[k];

    Spectrum out;
    out.convention = PsdConvention::per_hz;
    out.meta = "welch";
    out.freqs_hz.resize(nbin);
    out.values.resize(nbin);
    const double scale = ts.gain / (ts.sample_rate_hz * wpow * nseg);
    for (std::size_t k = 0; k < nbin; ++k) {
        const bool edge = k == 0 || (seg % 2 == 0 && k == nbin - 1);
        out.freqs_hz[k] = ts.lo_hz + k * ts.sample_rate_hz / seg;
        out.values[k] = (edge ? 1.0 : 2.0) * acc[k] * scale;
    }
    return out;
}

TimeSeries surrogate_timeseries(const model::DerivedRates& rates, double omega01, double duration,
                                double fs, std::uint64_t seed) {
    const double linewidth_hz = units::rad_to_hz(rates.gamma_2);
    if (!(fs > 10.0 * linewidth_hz))
        throw DomainError("surrogate: sample rate must exceed 10 gamma_2 / 2pi");
    if (!(duration > 0.0)) throw DomainError("surrogate: duration must be positive");

    const double power = units::photon_energy(omega01) * rates.gamma_r * rates.gamma_n
                         * rates.delta_n() / rates.gamma_1;
    if (power < 0.0) throw DomainError("surrogate: negative line power (delta_n < 0)");

    TimeSeries ts;
    ts.sample_rate_hz = fs;
    ts.gain = surrogate_gain;
    const double fc = fs / 4.0;
    ts.lo_hz = units::rad_to_hz(omega01) - fc;
    const auto n = static_cast<std::size_t>(std::llround(duration * fs));
    ts.samples.assign(n, 0.0);
    if (power == 0.0) return ts;

    // Complex OU process with exact discretisation; Re z has variance
    // sigma^2 / 2, which is matched to the line power.
    const double dt = 1.0 / fs;
    const std::complex<double> a = std::exp(std::complex<double>(-rates.gamma_2 * dt, 2.0 * M_PI * fc * dt));
    const double var_x = power / surrogate_gain;
    const double sigma2 = 2.0 * var_x;
    const double innov = std::sqrt(sigma2 * (1.0 - std::norm(a)) / 2.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::complex<double> z(g(rng) * std::sqrt(sigma2 / 2.0), g(rng) * std::sqrt(sigma2 / 2.0));
    for (std::size_t k = 0; k < n; ++k) {
        ts.samples[k] = z.real();
        const double re = g(rng), im = g(rng);
        z = a * z + innov * std::complex<double>(re, im);
    }
    return ts;
}

Spectrum subtract_background(const Spectrum& on, const Spectrum& off) {
    if (on.freqs_hz != off.freqs_hz) throw DomainError("background subtraction needs identical grids");
    if (on.convention != off.convention) throw DomainError("background subtraction needs one PSD convention");
    Spectrum d = on;
    for (std::size_t k = 0; k < d.size(); ++k) d.values[k] = on.values[k] - off.values[k];
    d.meta = "difference";
    return d;
}

} // namespace wgheat::welch
