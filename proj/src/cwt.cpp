#include "tdt/cwt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "tdt/error.hpp"

namespace tdt {

namespace {

const double kMorletNorm = std::pow(std::numbers::pi, -0.25);

struct KernelTaps {
    double scale, step, omega0, radius;
    std::size_t reach;
    std::vector<double> re, im;
};

// Taps of dt/sqrt(a) * conj(psi(k dt / a)) for |k dt| <= radius * a, cached per
// thread because the same few scales are reused for every document.
const KernelTaps& kernel_taps(double a, double dt, double omega0, double radius) {
    thread_local std::vector<KernelTaps> cache;
    for (const auto& t : cache) {
        if (t.scale == a && t.step == dt && t.omega0 == omega0 && t.radius == radius) return t;
    }
    if (cache.size() > 256) cache.clear();
    KernelTaps taps{a, dt, omega0, radius, 0, {}, {}};
    taps.reach = static_cast<std::size_t>(std::floor(radius * a / dt + 1e-9));
    const double weight = dt / std::sqrt(a);
    taps.re.resize(2 * taps.reach + 1);
    taps.im.resize(2 * taps.reach + 1);
    for (std::size_t k = 0; k < taps.re.size(); ++k) {
        const double offset = (static_cast<double>(k) - static_cast<double>(taps.reach)) * dt;
        const Complex c = weight * std::conj(morlet(offset / a, omega0));
        taps.re[k] = c.real();
        taps.im[k] = c.imag();
    }
    cache.push_back(std::move(taps));
    return cache.back();
}

} // namespace

MorletConfig MorletConfig::with_scale_count(std::size_t count) {
    MorletConfig cfg;
    cfg.scales.clear();
    for (std::size_t a = 1; a <= count; ++a) cfg.scales.push_back(static_cast<double>(a));
    return cfg;
}

void MorletConfig::validate() const {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw UsageError("omega0 must be a finite value > 0");
    if (!(truncation_radius_sigmas > 0.0)) throw UsageError("truncation radius must be > 0");
    if (scales.empty()) throw UsageError("scale list is empty");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) throw UsageError("scales must be finite and > 0");
        if (i > 0 && !(scales[i] > scales[i - 1])) throw UsageError("scales must be strictly increasing");
    }
}

Complex morlet(double t, double omega0) {
    return kMorletNorm * std::exp(-0.5 * t * t) * Complex(std::cos(omega0 * t), std::sin(omega0 * t));
}

Scalogram::Scalogram(std::vector<double> scales, std::size_t width, double grid_start, double grid_step)
    : scales_(std::move(scales)), width_(width), grid_start_(grid_start), grid_step_(grid_step),
      data_(scales_.size() * width) {}

std::size_t Scalogram::argmax_column(std::size_t row) const {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t c = 0; c < width_; ++c) {
        const double mag = std::abs(at(row, c));
        if (mag > best_mag) {
            best_mag = mag;
            best = c;
        }
    }
    return best;
}

void Scalogram::write_csv(std::ostream& out) const {
    out.precision(17);
    for (std::size_t r = 0; r < rows(); ++r) {
        out << scales_[r];
        for (std::size_t c = 0; c < width_; ++c) out << ',' << at(r, c).real() << ',' << at(r, c).imag();
        out << '\n';
    }
}

Scalogram transform(const SmoothedSignal& signal, const MorletConfig& cfg) {
    cfg.validate();
    const std::size_t m = signal.size();
    if (m < 2) throw DataError("signal too short for the wavelet transform (need at least 2 grid points)");

    const double dt = signal.grid_step;
    Scalogram out(cfg.scales, m, signal.grid_start, dt);
    const auto x = std::span<const double>(signal.values);

    std::vector<double> acc_re(m), acc_im(m);
    for (std::size_t r = 0; r < cfg.scales.size(); ++r) {
        const double a = cfg.scales[r];
        const KernelTaps& taps = kernel_taps(a, dt, cfg.omega0, cfg.truncation_radius_sigmas);
        const std::size_t reach = taps.reach;
        const auto& kernel_re = taps.re;
        const auto& kernel_im = taps.im;

        // W(b) = sum_k x[b + k - reach] * kernel[k], accumulated one offset at
        // a time over all b (zero padding outside [0, m)).
        std::fill(acc_re.begin(), acc_re.end(), 0.0);
        std::fill(acc_im.begin(), acc_im.end(), 0.0);
        for (std::size_t k = 0; k < kernel_re.size(); ++k) {
            const double kr = kernel_re[k];
            const double ki = kernel_im[k];
            // valid b: 0 <= b + k - reach < m
            if (k >= m + reach) break;
            const std::size_t b_lo = k < reach ? reach - k : 0;
            const std::size_t b_hi = std::min(m, m + reach - k); // exclusive
            if (b_lo >= b_hi) continue;
            const double* xs = x.data() + (b_lo + k - reach);
            double* re = acc_re.data() + b_lo;
            double* im = acc_im.data() + b_lo;
            const std::size_t len = b_hi - b_lo;
            for (std::size_t i = 0; i < len; ++i) {
                re[i] += xs[i] * kr;
                im[i] += xs[i] * ki;
            }
        }
        for (std::size_t b = 0; b < m; ++b) {
            if (!std::isfinite(acc_re[b]) || !std::isfinite(acc_im[b])) {
                throw NumericalError("non-finite wavelet coefficient at scale " + std::to_string(a));
            }
            out.at(r, b) = Complex(acc_re[b], acc_im[b]);
        }
    }
    return out;
}

ScaleBands scale_band_slices(std::size_t scale_count) {
    if (scale_count < 3) throw UsageError("at least 3 scales are needed to form three bands");
    const std::size_t base = scale_count / 3;
    const std::size_t extra = scale_count % 3;
    std::size_t sizes[3];
    for (std::size_t i = 0; i < 3; ++i) sizes[i] = base + (i < extra ? 1 : 0);
    ScaleBands bands;
    bands.morph = {0, sizes[0]};
    bands.syn = {sizes[0], sizes[0] + sizes[1]};
    bands.disc = {sizes[0] + sizes[1], scale_count};
    return bands;
}

} // namespace tdt
