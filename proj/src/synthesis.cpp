// SPDX-License-Identifier: Apache-2.0
//
// pathfuse: robust fusion of ABG path-loss models
// Copyright (C) 2026 The pathfuse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "pathfuse/synthesis.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <numeric>
#include <random>

#include "pathfuse/errors.hpp"

namespace pathfuse {

std::string_view to_string(DistanceSampling sampling)
{
    switch (sampling) {
    case DistanceSampling::UniformDistance: return "uniform";
    case DistanceSampling::UniformLogDistance: return "log";
    case DistanceSampling::MeterGrid: return "grid";
    }
    return "?";
}

DistanceSampling parse_distance_sampling(std::string_view text)
{
    if (text == "uniform") return DistanceSampling::UniformDistance;
    if (text == "log") return DistanceSampling::UniformLogDistance;
    if (text == "grid") return DistanceSampling::MeterGrid;
    throw Error(ErrorKind::Config, "unknown distance sampling '" + std::string(text) + "' (uniform|log|grid)");
}

void SynthesisSpec::validate() const
{
    if (points_per_model < 1) throw Error(ErrorKind::Config, "points_per_model must be >= 1");
    if (!(noise_scale >= 0.0)) throw Error(ErrorKind::Config, "noise_scale must be >= 0");
}

SynthesisSpec experiment_synthesis_spec(std::uint64_t seed)
{
    SynthesisSpec spec;
    spec.distance_sampling = DistanceSampling::MeterGrid;
    spec.seed = seed;
    return spec;
}

void OutlierSpec::validate() const
{
    if (!(rho > 0.0)) throw Error(ErrorKind::Config, "outlier rho must be > 0");
    if (!(band_width_m > 0.0)) throw Error(ErrorKind::Config, "outlier band width must be > 0");
    if (!(contamination_fraction >= 0.0 && contamination_fraction <= 1.0))
        throw Error(ErrorKind::Config, "contamination fraction must lie in [0, 1]");
    if (!(magnitude_scale >= 0.0)) throw Error(ErrorKind::Config, "outlier magnitude scale must be >= 0");
}

double rayleigh_from_uniform(double rho, double u)
{
    return std::sqrt(-2.0 * rho * std::log1p(-u));
}

double sample_rayleigh(double rho, Rng& rng)
{
    return rayleigh_from_uniform(rho, uniform_open01(rng));
}

Rng model_stream(std::uint64_t seed, std::string_view model_id)
{
    return make_rng(seed, model_id);
}

namespace {

// Marsaglia polar method; std::normal_distribution is implementation-defined.
double standard_normal(Rng& rng)
{
    while (true) {
        const double u = 2.0 * uniform_open01(rng) - 1.0;
        const double v = 2.0 * uniform_open01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

}  // namespace

std::vector<PathLossSample> synthesize_from_model(const SourceModel& m, const SynthesisSpec& spec, Rng& rng)
{
    m.validate();
    spec.validate();
    std::vector<double> distances;
    switch (spec.distance_sampling) {
    case DistanceSampling::MeterGrid:
        for (double d = std::ceil(m.dist_min_m); d <= m.dist_max_m; d += 1.0) distances.push_back(d);
        break;
    case DistanceSampling::UniformDistance:
        for (int i = 0; i < spec.points_per_model; ++i)
            distances.push_back(m.dist_min_m + (m.dist_max_m - m.dist_min_m) * uniform_open01(rng));
        break;
    case DistanceSampling::UniformLogDistance: {
        const double a = std::log10(m.dist_min_m);
        const double b = std::log10(m.dist_max_m);
        for (int i = 0; i < spec.points_per_model; ++i)
            distances.push_back(std::pow(10.0, a + (b - a) * uniform_open01(rng)));
        break;
    }
    }
    const double sigma = m.sigma_db * spec.noise_scale;
    std::vector<PathLossSample> out;
    out.reserve(distances.size());
    for (double d : distances) {
        double pl = predict(m, d);
        if (sigma > 0.0) pl += sigma * standard_normal(rng);
        out.push_back({d, m.frequency_ghz, pl, m.id, 1.0});
    }
    return out;
}

std::vector<PathLossSample> synthesize_corpus(std::span<const SourceModel> models, const SynthesisSpec& spec)
{
    if (models.empty()) throw Error(ErrorKind::Config, "no source models to synthesize from");
    std::vector<const SourceModel*> ordered;
    for (const auto& m : models) ordered.push_back(&m);
    std::stable_sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::vector<PathLossSample> corpus;
    for (const auto* m : ordered) {
        auto rng = model_stream(spec.seed, m->id);
        auto part = synthesize_from_model(*m, spec, rng);
        corpus.insert(corpus.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return corpus;
}

ContaminatedSamples inject_outliers(std::span<const PathLossSample> samples, const OutlierSpec& spec, Rng& rng)
{
    spec.validate();
    ContaminatedSamples out{std::vector<PathLossSample>(samples.begin(), samples.end()),
                            std::vector<bool>(samples.size(), false)};
    if (samples.empty()) throw Error(ErrorKind::Config, "cannot inject outliers into an empty sample set");
    double center = 0.0;
    if (spec.band_center_m) {
        center = *spec.band_center_m;
    } else {
        const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
            return a.distance_m < b.distance_m;
        });
        center = 0.5 * (lo->distance_m + hi->distance_m);
    }
    const double half = 0.5 * spec.band_width_m;
    std::vector<std::size_t> in_band;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (std::abs(samples[i].distance_m - center) <= half) in_band.push_back(i);
    if (in_band.empty()) throw Error(ErrorKind::Config, "outlier band does not intersect the samples' distance range");

    const auto count = static_cast<std::size_t>(std::llround(spec.contamination_fraction * static_cast<double>(in_band.size())));
    // Partial Fisher-Yates: the first `count` positions become the contaminated set.
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, in_band.size() - i));
        std::swap(in_band[i], in_band[j]);
    }
    std::sort(in_band.begin(), in_band.begin() + static_cast<std::ptrdiff_t>(count));
    for (std::size_t k = 0; k < count; ++k) {
        const auto i = in_band[k];
        out.samples[i].path_loss_db += spec.magnitude_scale * sample_rayleigh(spec.rho, rng);
        out.outlier_mask[i] = true;
    }
    return out;
}

ContaminatedSamples inject_outliers_per_source(std::span<const PathLossSample> samples, const OutlierSpec& spec)
{
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) groups[samples[i].source_id].push_back(i);
    if (groups.empty()) throw Error(ErrorKind::Config, "cannot inject outliers into an empty sample set");
    ContaminatedSamples out{std::vector<PathLossSample>(samples.begin(), samples.end()),
                            std::vector<bool>(samples.size(), false)};
    for (const auto& [id, members] : groups) {
        std::vector<PathLossSample> part;
        part.reserve(members.size());
        for (auto i : members) part.push_back(samples[i]);
        auto rng = make_rng(spec.seed, id);
        const auto dirty = inject_outliers(part, spec, rng);
        for (std::size_t k = 0; k < members.size(); ++k) {
            out.samples[members[k]] = dirty.samples[k];
            out.outlier_mask[members[k]] = dirty.outlier_mask[k];
        }
    }
    return out;
}

}  // namespace pathfuse
