#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tdt/kde.hpp"

namespace tdt {

using Complex = std::complex<double>;

struct MorletConfig {
    double omega0 = 6.0;
    std::vector<double> scales = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    double truncation_radius_sigmas = 4.0;

    // Integer scales 1..count.
    static MorletConfig with_scale_count(std::size_t count);
    void validate() const;
};

// psi(t) = pi^(-1/4) exp(i omega0 t) exp(-t^2/2)
Complex morlet(double t, double omega0 = 6.0);

// Row-major |scales| x m array of wavelet coefficients.
class Scalogram {
public:
    Scalogram(std::vector<double> scales, std::size_t width, double grid_start, double grid_step);

    std::size_t rows() const { return scales_.size(); }
    std::size_t cols() const { return width_; }
    const std::vector<double>& scales() const { return scales_; }
    double grid_start() const { return grid_start_; }
    double grid_step() const { return grid_step_; }

    Complex& at(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
    const Complex& at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }

    // Column index of max |W| in the given row.
    std::size_t argmax_column(std::size_t row) const;

    // One scale row per line, real/imag interleaved.
    void write_csv(std::ostream& out) const;

private:
    std::vector<double> scales_;
    std::size_t width_;
    double grid_start_;
    double grid_step_;
    std::vector<Complex> data_;
};

// W(a,b) = (1/sqrt a) dt sum_t x(t) conj(psi((t-b)/a)), support |t-b| <= radius*a,
// zero outside the signal.
Scalogram transform(const SmoothedSignal& signal, const MorletConfig& cfg = {});

// Contiguous index range [begin, end) into the scale list.
struct BandRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const BandRange&) const = default;
};

struct ScaleBands {
    BandRange morph;
    BandRange syn;
    BandRange disc;
};

// Near-equal contiguous thirds, larger bands first (12 -> 4/4/4, 8 -> 3/3/2).
ScaleBands scale_band_slices(std::size_t scale_count);
inline ScaleBands scale_band_slices(const MorletConfig& cfg) { return scale_band_slices(cfg.scales.size()); }

} // namespace tdt
