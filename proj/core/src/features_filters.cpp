#include "radml/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace radml::features {

namespace {

constexpr double kPi = std::numbers::pi;

/// One axial slice restricted to the lesion bounding box plus the filter
/// context margin. Filters never read pixels outside the window; reads past
/// its edge reflect back in (mirror padding).
struct SliceWindow {
    int w = 0, h = 0;
    std::vector<double> data;                 // row-major window pixels
    std::vector<std::pair<int, int>> fg;      // in-mask pixels, window coords
    std::vector<std::pair<int, int>> fg_inner; // 2-D eroded subset
    std::vector<std::pair<int, int>> fg_edge;  // fg minus eroded

    double at_reflect(int x, int y) const {
        while (x < 0 || x >= w) x = x < 0 ? -x - 1 : 2 * w - 1 - x;
        while (y < 0 || y >= h) y = y < 0 ? -y - 1 : 2 * h - 1 - y;
        return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + x];
    }
};

std::vector<SliceWindow> make_windows(const ImageVolume& image, const RoiMask& mask) {
    const long nx = static_cast<long>(image.dims[0]);
    const long ny = static_cast<long>(image.dims[1]);
    const long nz = static_cast<long>(image.dims[2]);
    std::vector<SliceWindow> windows;
    for (long z = 0; z < nz; ++z) {
        long x0 = nx, x1 = -1, y0 = ny, y1 = -1;
        for (long y = 0; y < ny; ++y) {
            for (long x = 0; x < nx; ++x) {
                if (!mask.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                             static_cast<std::size_t>(z))) {
                    continue;
                }
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        }
        if (x1 < 0) continue; // slice without lesion
        x0 = std::max<long>(0, x0 - kFilterContextMargin);
        y0 = std::max<long>(0, y0 - kFilterContextMargin);
        x1 = std::min<long>(nx - 1, x1 + kFilterContextMargin);
        y1 = std::min<long>(ny - 1, y1 + kFilterContextMargin);

        SliceWindow win;
        win.w = static_cast<int>(x1 - x0 + 1);
        win.h = static_cast<int>(y1 - y0 + 1);
        win.data.resize(static_cast<std::size_t>(win.w) * win.h);
        auto in_mask = [&](long x, long y) {
            if (x < 0 || y < 0 || x >= nx || y >= ny) return false;
            return mask.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                           static_cast<std::size_t>(z));
        };
        for (long y = y0; y <= y1; ++y) {
            for (long x = x0; x <= x1; ++x) {
                win.data[static_cast<std::size_t>(y - y0) * win.w + (x - x0)] =
                    image.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                             static_cast<std::size_t>(z));
                if (!in_mask(x, y)) continue;
                const auto px = std::make_pair(static_cast<int>(x - x0), static_cast<int>(y - y0));
                win.fg.push_back(px);
                bool eroded = true;
                for (int dy = -1; dy <= 1 && eroded; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!in_mask(x + dx, y + dy)) {
                            eroded = false;
                            break;
                        }
                    }
                }
                (eroded ? win.fg_inner : win.fg_edge).push_back(px);
            }
        }
        windows.push_back(std::move(win));
    }
    if (windows.empty()) throw DataError("filter features of an empty mask");
    return windows;
}

std::vector<double> stats13_of(const std::vector<double>& pooled) {
    const auto a = stats13(pooled).as_array();
    return std::vector<double>(a.begin(), a.end());
}

// ---------------------------------------------------------------- LBP ------

int lbp_riu2(const SliceWindow& win, int x, int y, int radius, int neighbors) {
    const double center = win.at_reflect(x, y);
    std::vector<int> bits(static_cast<std::size_t>(neighbors));
    for (int k = 0; k < neighbors; ++k) {
        const double angle = 2.0 * kPi * k / neighbors;
        const double sx = x + radius * std::cos(angle);
        const double sy = y - radius * std::sin(angle);
        const int fx = static_cast<int>(std::floor(sx));
        const int fy = static_cast<int>(std::floor(sy));
        const double tx = sx - fx, ty = sy - fy;
        const double v = (1 - tx) * (1 - ty) * win.at_reflect(fx, fy) +
                         tx * (1 - ty) * win.at_reflect(fx + 1, fy) +
                         (1 - tx) * ty * win.at_reflect(fx, fy + 1) +
                         tx * ty * win.at_reflect(fx + 1, fy + 1);
        bits[static_cast<std::size_t>(k)] = v >= center ? 1 : 0;
    }
    int transitions = 0, ones = 0;
    for (int k = 0; k < neighbors; ++k) {
        ones += bits[static_cast<std::size_t>(k)];
        if (bits[static_cast<std::size_t>(k)] != bits[static_cast<std::size_t>((k + 1) % neighbors)]) {
            ++transitions;
        }
    }
    return transitions <= 2 ? ones : neighbors + 1;
}

// --------------------------------------------------------------- Gabor -----

struct GaborKernel {
    int half;
    std::vector<double> re, im;
};

GaborKernel make_gabor(double frequency, double angle) {
    // one-octave bandwidth envelope
    const double sigma = 0.5622 / frequency;
    GaborKernel k;
    k.half = static_cast<int>(std::ceil(2.5 * sigma));
    const int n = 2 * k.half + 1;
    k.re.resize(static_cast<std::size_t>(n) * n);
    k.im.resize(static_cast<std::size_t>(n) * n);
    const double c = std::cos(angle), s = std::sin(angle);
    double re_sum = 0.0;
    for (int y = -k.half; y <= k.half; ++y) {
        for (int x = -k.half; x <= k.half; ++x) {
            const double xr = x * c + y * s;
            const double env = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            const double phase = 2.0 * kPi * frequency * xr;
            const std::size_t i =
                static_cast<std::size_t>(y + k.half) * static_cast<std::size_t>(n) + (x + k.half);
            k.re[i] = env * std::cos(phase);
            k.im[i] = env * std::sin(phase);
            re_sum += k.re[i];
        }
    }
    // remove the DC response so constant regions map to zero
    const double mean = re_sum / (static_cast<double>(n) * n);
    for (auto& v : k.re) v -= mean;
    return k;
}

double apply_complex_kernel(const SliceWindow& win, int x, int y, const GaborKernel& k) {
    double re = 0, im = 0;
    const int n = 2 * k.half + 1;
    for (int dy = -k.half; dy <= k.half; ++dy) {
        for (int dx = -k.half; dx <= k.half; ++dx) {
            const double v = win.at_reflect(x + dx, y + dy);
            const std::size_t i =
                static_cast<std::size_t>(dy + k.half) * static_cast<std::size_t>(n) + (dx + k.half);
            re += v * k.re[i];
            im += v * k.im[i];
        }
    }
    return std::sqrt(re * re + im * im);
}

// ------------------------------------------------------- LoG / Gaussian ----

struct Kernel2D {
    int half;
    std::vector<double> w;
};

Kernel2D make_log_kernel(double sigma) {
    Kernel2D k;
    k.half = static_cast<int>(std::ceil(3.0 * sigma));
    const int n = 2 * k.half + 1;
    k.w.resize(static_cast<std::size_t>(n) * n);
    double sum = 0.0;
    for (int y = -k.half; y <= k.half; ++y) {
        for (int x = -k.half; x <= k.half; ++x) {
            const double r2 = x * x + y * y;
            const double g = std::exp(-r2 / (2.0 * sigma * sigma));
            // scale-normalized Laplacian of Gaussian
            const double v = (r2 / (sigma * sigma) - 2.0) * g;
            k.w[static_cast<std::size_t>(y + k.half) * static_cast<std::size_t>(n) + (x + k.half)] = v;
            sum += v;
        }
    }
    const double mean = sum / (static_cast<double>(n) * n);
    for (auto& v : k.w) v -= mean; // exact zero response to constants
    return k;
}

/// Gaussian-derivative kernels for the scale-normalized Hessian.
enum class Deriv { XX, YY, XY };

Kernel2D make_hessian_kernel(double sigma, Deriv which) {
    Kernel2D k;
    k.half = static_cast<int>(std::ceil(3.0 * sigma));
    const int n = 2 * k.half + 1;
    k.w.resize(static_cast<std::size_t>(n) * n);
    const double s2 = sigma * sigma;
    double sum = 0.0;
    for (int y = -k.half; y <= k.half; ++y) {
        for (int x = -k.half; x <= k.half; ++x) {
            const double g = std::exp(-(x * x + y * y) / (2.0 * s2));
            double v = 0.0;
            switch (which) {
                case Deriv::XX: v = (x * x / s2 - 1.0) / s2 * g; break;
                case Deriv::YY: v = (y * y / s2 - 1.0) / s2 * g; break;
                case Deriv::XY: v = (x * y) / (s2 * s2) * g; break;
            }
            v *= s2; // scale normalization
            k.w[static_cast<std::size_t>(y + k.half) * static_cast<std::size_t>(n) + (x + k.half)] = v;
            sum += v;
        }
    }
    const double mean = sum / (static_cast<double>(n) * n);
    for (auto& v : k.w) v -= mean;
    return k;
}

double apply_kernel(const SliceWindow& win, int x, int y, const Kernel2D& k) {
    double acc = 0;
    const int n = 2 * k.half + 1;
    for (int dy = -k.half; dy <= k.half; ++dy) {
        for (int dx = -k.half; dx <= k.half; ++dx) {
            acc += win.at_reflect(x + dx, y + dy) *
                   k.w[static_cast<std::size_t>(dy + k.half) * static_cast<std::size_t>(n) +
                       (dx + k.half)];
        }
    }
    return acc;
}

// -------------------------------------------------------------- Frangi -----

/// Frangi vesselness per pixel set, maximum over scales 1,3,5,7,9 (the
/// (1.0, 10.0) range at step 2). beta = 0.5; c is half the largest Hessian
/// norm over the evaluated pixels of the slice at that scale. Bright ridges
/// only (lambda2 < 0).
std::vector<double> frangi_slice(const SliceWindow& win,
                                 const std::vector<std::pair<int, int>>& pixels) {
    static const std::vector<double> scales = {1.0, 3.0, 5.0, 7.0, 9.0};
    std::vector<double> best(pixels.size(), 0.0);
    double max_abs = 0.0;
    for (double v : win.data) max_abs = std::max(max_abs, std::abs(v));
    // Hessian norms at or below rounding noise mean a flat slice.
    const double noise_floor = 1e-9 * (1.0 + max_abs);
    for (double sigma : scales) {
        const Kernel2D kxx = make_hessian_kernel(sigma, Deriv::XX);
        const Kernel2D kyy = make_hessian_kernel(sigma, Deriv::YY);
        const Kernel2D kxy = make_hessian_kernel(sigma, Deriv::XY);
        std::vector<double> l1(pixels.size()), l2(pixels.size()), snorm(pixels.size());
        double s_max = 0.0;
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            const auto [x, y] = pixels[i];
            const double hxx = apply_kernel(win, x, y, kxx);
            const double hyy = apply_kernel(win, x, y, kyy);
            const double hxy = apply_kernel(win, x, y, kxy);
            const double tr = hxx + hyy;
            const double det_term = std::sqrt(std::max(0.0, (hxx - hyy) * (hxx - hyy) / 4.0 + hxy * hxy));
            double a = tr / 2.0 + det_term;
            double b = tr / 2.0 - det_term;
            if (std::abs(a) > std::abs(b)) std::swap(a, b); // |l1| <= |l2|
            l1[i] = a;
            l2[i] = b;
            snorm[i] = std::sqrt(hxx * hxx + 2.0 * hxy * hxy + hyy * hyy);
            s_max = std::max(s_max, snorm[i]);
        }
        if (s_max <= noise_floor) continue;
        const double c = s_max / 2.0;
        const double beta = 0.5;
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            if (l2[i] >= 0.0) continue;
            const double rb = l1[i] / l2[i];
            const double v = std::exp(-rb * rb / (2.0 * beta * beta)) *
                             (1.0 - std::exp(-snorm[i] * snorm[i] / (2.0 * c * c)));
            best[i] = std::max(best[i], v);
        }
    }
    return best;
}

// ------------------------------------------------------- monogenic phase ---

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

struct Spectrum {
    std::size_t n; // square side, power of two
    std::vector<std::complex<double>> data;
};

void fft2(Spectrum& s, bool inverse) {
    std::vector<std::complex<double>> line(s.n);
    for (std::size_t y = 0; y < s.n; ++y) {
        for (std::size_t x = 0; x < s.n; ++x) line[x] = s.data[y * s.n + x];
        fft_radix2(line, inverse);
        for (std::size_t x = 0; x < s.n; ++x) s.data[y * s.n + x] = line[x];
    }
    for (std::size_t x = 0; x < s.n; ++x) {
        for (std::size_t y = 0; y < s.n; ++y) line[y] = s.data[y * s.n + x];
        fft_radix2(line, inverse);
        for (std::size_t y = 0; y < s.n; ++y) s.data[y * s.n + x] = line[y];
    }
}

struct MonogenicResponses {
    // per scale: even, riesz-x, riesz-y at the window pixels
    std::vector<std::vector<double>> even, rx, ry;
    int w, h;
};

MonogenicResponses monogenic(const SliceWindow& win) {
    static const std::vector<double> wavelengths = {4.0, 8.0, 16.0};
    constexpr double kSigmaOnF = 0.55;

    std::size_t n = 8;
    while (n < static_cast<std::size_t>(std::max(win.w, win.h))) n <<= 1;

    Spectrum img{n, std::vector<std::complex<double>>(n * n)};
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            img.data[y * n + x] = win.at_reflect(static_cast<int>(x), static_cast<int>(y));
        }
    }
    fft2(img, false);

    auto freq = [&](std::size_t i) {
        const double f = static_cast<double>(i) / static_cast<double>(n);
        return f <= 0.5 ? f : f - 1.0;
    };

    MonogenicResponses out;
    out.w = win.w;
    out.h = win.h;
    const double log_sigma = std::log(kSigmaOnF);
    for (double lambda : wavelengths) {
        Spectrum even{n, std::vector<std::complex<double>>(n * n)};
        Spectrum rx{n, std::vector<std::complex<double>>(n * n)};
        Spectrum ry{n, std::vector<std::complex<double>>(n * n)};
        const double f0 = 1.0 / lambda;
        for (std::size_t y = 0; y < n; ++y) {
            for (std::size_t x = 0; x < n; ++x) {
                const double fx = freq(x), fy = freq(y);
                const double f = std::sqrt(fx * fx + fy * fy);
                double g = 0.0;
                if (f > 0.0) {
                    const double lr = std::log(f / f0);
                    g = std::exp(-lr * lr / (2.0 * log_sigma * log_sigma));
                }
                const auto base = img.data[y * n + x] * g;
                even.data[y * n + x] = base;
                if (f > 0.0) {
                    const std::complex<double> i_unit(0.0, 1.0);
                    rx.data[y * n + x] = base * i_unit * (fx / f);
                    ry.data[y * n + x] = base * i_unit * (fy / f);
                }
            }
        }
        fft2(even, true);
        fft2(rx, true);
        fft2(ry, true);
        std::vector<double> ev(static_cast<std::size_t>(win.w) * win.h);
        std::vector<double> vx(ev.size()), vy(ev.size());
        for (int y = 0; y < win.h; ++y) {
            for (int x = 0; x < win.w; ++x) {
                const std::size_t src = static_cast<std::size_t>(y) * n + static_cast<std::size_t>(x);
                const std::size_t dst = static_cast<std::size_t>(y) * win.w + x;
                ev[dst] = even.data[src].real();
                vx[dst] = rx.data[src].real();
                vy[dst] = ry.data[src].real();
            }
        }
        out.even.push_back(std::move(ev));
        out.rx.push_back(std::move(vx));
        out.ry.push_back(std::move(vy));
    }
    return out;
}

} // namespace

std::vector<double> filter_bank_features(const ImageVolume& image, const RoiMask& mask) {
    check_paired(image, mask);
    const auto windows = make_windows(image, mask);

    std::vector<double> out;
    out.reserve(312);

    // LBP: rotation-invariant uniform codes at three (radius, neighbors) setups
    static const std::vector<std::pair<int, int>> lbp_setups = {{1, 8}, {2, 12}, {3, 16}};
    for (const auto& [radius, neighbors] : lbp_setups) {
        std::vector<double> pooled;
        for (const auto& win : windows) {
            for (const auto& [x, y] : win.fg) {
                pooled.push_back(static_cast<double>(lbp_riu2(win, x, y, radius, neighbors)));
            }
        }
        const auto s = stats13_of(pooled);
        out.insert(out.end(), s.begin(), s.end());
    }

    // Gabor magnitude at 3 frequencies x 4 angles
    static const std::vector<double> frequencies = {0.05, 0.2, 0.5};
    static const std::vector<double> angles = {0.0, kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0};
    for (double f : frequencies) {
        for (double a : angles) {
            const GaborKernel kernel = make_gabor(f, a);
            std::vector<double> pooled;
            for (const auto& win : windows) {
                for (const auto& [x, y] : win.fg) {
                    pooled.push_back(apply_complex_kernel(win, x, y, kernel));
                }
            }
            const auto s = stats13_of(pooled);
            out.insert(out.end(), s.begin(), s.end());
        }
    }

    // scale-normalized Laplacian of Gaussian at widths 1, 5, 10
    for (double sigma : {1.0, 5.0, 10.0}) {
        const Kernel2D kernel = make_log_kernel(sigma);
        std::vector<double> pooled;
        for (const auto& win : windows) {
            for (const auto& [x, y] : win.fg) pooled.push_back(apply_kernel(win, x, y, kernel));
        }
        const auto s = stats13_of(pooled);
        out.insert(out.end(), s.begin(), s.end());
    }

    // Frangi vesselness over full mask / edge ring / inner region
    {
        std::vector<double> full, edge, inner;
        for (const auto& win : windows) {
            auto v_full = frangi_slice(win, win.fg);
            full.insert(full.end(), v_full.begin(), v_full.end());
            auto v_edge = frangi_slice(win, win.fg_edge);
            edge.insert(edge.end(), v_edge.begin(), v_edge.end());
            auto v_inner = frangi_slice(win, win.fg_inner);
            inner.insert(inner.end(), v_inner.begin(), v_inner.end());
        }
        if (edge.empty()) edge = full;
        if (inner.empty()) inner = full; // erosion emptied the mask
        for (const auto* pooled : {&full, &edge, &inner}) {
            const auto s = stats13_of(*pooled);
            out.insert(out.end(), s.begin(), s.end());
        }
    }

    // local phase: monogenic phase, phase congruency, phase symmetry
    {
        constexpr double kEps = 1e-12;
        std::vector<double> phase, congruency, symmetry;
        for (const auto& win : windows) {
            const MonogenicResponses r = monogenic(win);
            const std::size_t mid = 1; // wavelength 8 drives the phase image
            for (const auto& [x, y] : win.fg) {
                const std::size_t i = static_cast<std::size_t>(y) * win.w + x;
                const double odd_mid = std::hypot(r.rx[mid][i], r.ry[mid][i]);
                phase.push_back(std::atan2(odd_mid, r.even[mid][i]));

                double sum_e = 0, sum_rx = 0, sum_ry = 0, sum_a = 0, sum_sym = 0;
                for (std::size_t s = 0; s < r.even.size(); ++s) {
                    const double e = r.even[s][i];
                    const double ox = r.rx[s][i], oy = r.ry[s][i];
                    const double odd = std::hypot(ox, oy);
                    sum_e += e;
                    sum_rx += ox;
                    sum_ry += oy;
                    sum_a += std::sqrt(e * e + ox * ox + oy * oy);
                    sum_sym += std::max(std::abs(e) - odd, 0.0);
                }
                const double energy = std::sqrt(sum_e * sum_e + sum_rx * sum_rx + sum_ry * sum_ry);
                congruency.push_back(energy / (sum_a + kEps));
                symmetry.push_back(sum_sym / (sum_a + kEps));
            }
        }
        for (const auto* pooled : {&phase, &congruency, &symmetry}) {
            const auto s = stats13_of(*pooled);
            out.insert(out.end(), s.begin(), s.end());
        }
    }

    return out;
}

} // namespace radml::features
