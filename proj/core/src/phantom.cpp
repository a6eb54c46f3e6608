#include "radml/phantom.hpp"

#include "radml/rng.hpp"
#include "radml/threading.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace radml::phantom {

namespace {

void smooth_3tap(std::vector<double>& v, std::array<std::size_t, 3> dims, int axis) {
    const long nx = static_cast<long>(dims[0]);
    const long ny = static_cast<long>(dims[1]);
    const long nz = static_cast<long>(dims[2]);
    const long strides[3] = {1, nx, nx * ny};
    const long extent[3] = {nx, ny, nz};
    std::vector<double> out(v.size());
    for (long z = 0; z < nz; ++z) {
        for (long y = 0; y < ny; ++y) {
            for (long x = 0; x < nx; ++x) {
                const long idx = x + nx * (y + ny * z);
                const long pos = axis == 0 ? x : axis == 1 ? y : z;
                const double lo = pos > 0 ? v[static_cast<std::size_t>(idx - strides[axis])] : v[static_cast<std::size_t>(idx)];
                const double hi = pos < extent[axis] - 1 ? v[static_cast<std::size_t>(idx + strides[axis])] : v[static_cast<std::size_t>(idx)];
                out[static_cast<std::size_t>(idx)] = 0.25 * lo + 0.5 * v[static_cast<std::size_t>(idx)] + 0.25 * hi;
            }
        }
    }
    v = std::move(out);
}

PhantomPatient make_patient(const PhantomSpec& spec, int index) {
    Rng rng = Rng::derive(spec.master_seed, "phantom-patient", {static_cast<std::uint64_t>(index)});
    const int label = index % 2;
    const std::size_t n_batches = std::max<std::size_t>(1, spec.batch_shifts.size());
    const std::size_t batch = (static_cast<std::size_t>(index) / 2) % n_batches;
    const double batch_shift = spec.batch_shifts.empty() ? 0.0 : spec.batch_shifts[batch];

    const bool lesion_class = label == 1;
    const double lobulation = lesion_class ? spec.lobulation_amplitude : 0.0;

    const double margin = spec.radius_max * (1.0 + lobulation) + 2.0;
    for (std::size_t d = 0; d < 3; ++d) {
        if (2.0 * margin >= static_cast<double>(spec.dims[d])) {
            throw DataError("lesion cannot fit in the phantom volume");
        }
    }

    // geometry
    const double a = rng.uniform(spec.radius_min, spec.radius_max);
    const double b = rng.uniform(spec.radius_min, spec.radius_max);
    const double c = rng.uniform(spec.radius_min, spec.radius_max);
    const double cx = rng.uniform(margin, spec.dims[0] - 1 - margin);
    const double cy = rng.uniform(margin, spec.dims[1] - 1 - margin);
    const double cz = rng.uniform(margin, spec.dims[2] - 1 - margin);
    const double tilt = rng.uniform(0.0, std::numbers::pi);
    const double lobe_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double lesion_base = 60.0 + rng.uniform(-5.0, 5.0);

    PhantomPatient p;
    p.image.dims = spec.dims;
    p.image.spacing = spec.spacing;
    p.image.element_kind = ElementKind::Float;
    p.image.voxels.assign(spec.dims[0] * spec.dims[1] * spec.dims[2], 0.0);
    p.mask.dims = spec.dims;
    p.mask.spacing = spec.spacing;
    p.mask.voxels.assign(p.image.voxels.size(), 0);

    const double cos_t = std::cos(tilt), sin_t = std::sin(tilt);
    for (std::size_t z = 0; z < spec.dims[2]; ++z) {
        for (std::size_t y = 0; y < spec.dims[1]; ++y) {
            for (std::size_t x = 0; x < spec.dims[0]; ++x) {
                const double dx = static_cast<double>(x) - cx;
                const double dy = static_cast<double>(y) - cy;
                const double dz = static_cast<double>(z) - cz;
                const double u = dx * cos_t + dy * sin_t;
                const double v = -dx * sin_t + dy * cos_t;
                const double qx = u / a, qy = v / b, qz = dz / c;
                const double rho = std::sqrt(qx * qx + qy * qy + qz * qz);
                double limit = 1.0;
                if (lobulation > 0.0) {
                    const double theta = std::atan2(qy, qx);
                    limit += lobulation * std::sin(4.0 * theta + lobe_phase);
                }
                if (rho > limit) continue;
                p.mask.set(x, y, z, true);
                double value = lesion_base;
                if (lesion_class) {
                    value += spec.intensity_offset;
                    if (rho <= spec.necrotic_core_fraction * limit) value -= 60.0;
                }
                p.image.at(x, y, z) = value;
            }
        }
    }

    // Band-limited texture noise inside the mask (class-1 signature). The
    // white field is always drawn so the stream position does not depend on
    // the class.
    std::vector<double> noise(p.image.voxels.size());
    for (auto& n : noise) n = rng.normal();
    if (lesion_class && spec.texture_noise_amplitude > 0.0) {
        for (int axis = 0; axis < 3; ++axis) smooth_3tap(noise, spec.dims, axis);
        for (std::size_t i = 0; i < noise.size(); ++i) {
            if (p.mask.voxels[i]) p.image.voxels[i] += spec.texture_noise_amplitude * noise[i];
        }
    }

    for (auto& v : p.image.voxels) {
        v += batch_shift;
        v = static_cast<double>(static_cast<float>(v)); // storage precision
    }

    // clinical covariates, independent of the class
    char id[16];
    std::snprintf(id, sizeof(id), "P%04d", index);
    p.record.id = id;
    p.record.label = label;
    p.record.age = std::clamp(std::round(rng.normal(60.0, 12.0)), 20.0, 95.0);
    p.record.sex = rng.bernoulli(0.5) ? 'M' : 'F';
    static const char* kLocations[3] = {"stomach", "intestine", "other"};
    p.record.location = kLocations[rng.uniform_int(static_cast<std::uint64_t>(3))];
    p.record.batch = "B" + std::to_string(batch);
    return p;
}

} // namespace

void PhantomSpec::validate() const {
    if (n_per_class < 1) throw DataError("n_per_class must be at least 1");
    if (!(radius_min > 0.0) || radius_max < radius_min) throw DataError("bad phantom radius range");
    for (double k : {necrotic_core_fraction, texture_noise_amplitude, intensity_offset,
                     lobulation_amplitude}) {
        if (!std::isfinite(k)) throw DataError("phantom knobs must be finite");
    }
    if (necrotic_core_fraction < 0.0 || necrotic_core_fraction > 1.0) {
        throw DataError("necrotic core fraction must lie in [0, 1]");
    }
    if (lobulation_amplitude < 0.0 || lobulation_amplitude > 0.5) {
        throw DataError("lobulation amplitude must lie in [0, 0.5]");
    }
    const double margin = radius_max * (1.0 + lobulation_amplitude) + 2.0;
    for (std::size_t d = 0; d < 3; ++d) {
        if (2.0 * margin >= static_cast<double>(dims[d])) {
            throw DataError("lesion cannot fit in the phantom volume");
        }
    }
}

std::vector<PhantomPatient> generate_dataset(const PhantomSpec& spec) {
    spec.validate();
    const int total = 2 * spec.n_per_class;
    std::vector<PhantomPatient> patients(static_cast<std::size_t>(total));
    parallel_for(static_cast<std::size_t>(total), 0, [&](std::size_t i) {
        patients[i] = make_patient(spec, static_cast<int>(i));
    });
    return patients;
}

RoiMask perturb_mask(const RoiMask& mask, double magnitude, std::uint64_t seed) {
    mask.validate();
    if (magnitude < 0.0 || magnitude > 1.0) throw DataError("perturbation magnitude must lie in [0, 1]");
    if (magnitude == 0.0) return mask;

    const long nx = static_cast<long>(mask.dims[0]);
    const long ny = static_cast<long>(mask.dims[1]);
    const long nz = static_cast<long>(mask.dims[2]);
    auto at = [&](long x, long y, long z) -> bool {
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return false;
        return mask.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                       static_cast<std::size_t>(z));
    };

    Rng rng = Rng::derive(seed, "perturb-mask");
    RoiMask out = mask;
    for (long z = 0; z < nz; ++z) {
        for (long y = 0; y < ny; ++y) {
            for (long x = 0; x < nx; ++x) {
                const bool fg = at(x, y, z);
                bool boundary = false;
                for (const auto& d : {std::array<long, 3>{1, 0, 0}, std::array<long, 3>{-1, 0, 0},
                                      std::array<long, 3>{0, 1, 0}, std::array<long, 3>{0, -1, 0},
                                      std::array<long, 3>{0, 0, 1}, std::array<long, 3>{0, 0, -1}}) {
                    if (at(x + d[0], y + d[1], z + d[2]) != fg) {
                        boundary = true;
                        break;
                    }
                }
                if (!boundary) continue;
                if (rng.bernoulli(magnitude)) {
                    out.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                            static_cast<std::size_t>(z), !fg);
                }
            }
        }
    }

    // keep the largest 6-connected component
    std::vector<int> component(out.voxels.size(), -1);
    int best_component = -1;
    std::size_t best_size = 0;
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < out.voxels.size(); ++start) {
        if (!out.voxels[start] || component[start] >= 0) continue;
        std::size_t size = 0;
        component[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++size;
            const long x = static_cast<long>(i % static_cast<std::size_t>(nx));
            const long y = static_cast<long>((i / static_cast<std::size_t>(nx)) % static_cast<std::size_t>(ny));
            const long z = static_cast<long>(i / (static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)));
            for (const auto& d : {std::array<long, 3>{1, 0, 0}, std::array<long, 3>{-1, 0, 0},
                                  std::array<long, 3>{0, 1, 0}, std::array<long, 3>{0, -1, 0},
                                  std::array<long, 3>{0, 0, 1}, std::array<long, 3>{0, 0, -1}}) {
                const long x2 = x + d[0], y2 = y + d[1], z2 = z + d[2];
                if (x2 < 0 || y2 < 0 || z2 < 0 || x2 >= nx || y2 >= ny || z2 >= nz) continue;
                const std::size_t j = static_cast<std::size_t>(x2) +
                                      static_cast<std::size_t>(nx) *
                                          (static_cast<std::size_t>(y2) +
                                           static_cast<std::size_t>(ny) * static_cast<std::size_t>(z2));
                if (!out.voxels[j] || component[j] >= 0) continue;
                component[j] = next;
                stack.push_back(j);
            }
        }
        if (size > best_size) {
            best_size = size;
            best_component = next;
        }
        ++next;
    }
    if (best_component < 0) throw DataError("perturbation would empty the mask");
    for (std::size_t i = 0; i < out.voxels.size(); ++i) {
        out.voxels[i] = (out.voxels[i] && component[i] == best_component) ? 1 : 0;
    }
    return out;
}

} // namespace radml::phantom
