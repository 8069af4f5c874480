// SPDX-License-Identifier: Apache-2.0
//
// xlchan - near-field and spatially non-stationary THz XL-MIMO channel synthesis
// Copyright (C) 2026 The xlchan Authors
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

#include "xlchan/pipeline.hpp"
#include "xlchan/errors.hpp"
#include "xlchan/io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xlchan
{
    namespace
    {
        double deg(double d) { return d * pi / 180.0; }

        // Free-space amplitude over the total path length
        double friis_amplitude(double wavelength, double path_length, double loss_db)
        {
            return wavelength / (4.0 * pi * path_length) * std::pow(10.0, -loss_db / 20.0);
        }

        std::vector<Reflector> lab_room(double floor_z = 0.0)
        {
            // 8.34 x 6.05 x 2.4 m laboratory, painted concrete walls, plasterboard ceiling, tiled floor
            auto wall = [](std::string name, Vec3 p, Vec3 n, double loss)
            {
                Reflector r;
                r.name = std::move(name);
                r.plane = {p, n};
                r.loss_db = loss;
                return r;
            };
            return {wall("wall-x0", {0, 0, 0}, {1, 0, 0}, 6.0),
                    wall("wall-x1", {8.34, 0, 0}, {-1, 0, 0}, 6.0),
                    wall("wall-y0", {0, 0, 0}, {0, 1, 0}, 6.0),
                    wall("wall-y1", {0, 6.05, 0}, {0, -1, 0}, 6.0),
                    wall("floor", {0, 0, floor_z}, {0, 0, 1}, 8.0),
                    wall("ceiling", {0, 0, floor_z + 2.4}, {0, 0, -1}, 10.0)};
        }

        ScenarioConfig case1_base(std::string name)
        {
            ScenarioConfig c;
            c.name = std::move(name);
            c.array = {301, 1.364e-3, Vec3::UnitX(), 0, Vec3::Zero()};
            c.grid = {90e9, 110e9, 2001};
            c.patterns = {AntennaPattern::omnidirectional(5.0), AntennaPattern::omnidirectional(5.0)};
            // 0.645 m broadside distance, centered on the aperture (offset along the axis is a free parameter)
            c.receivers = {Vec3(0.5 * 300 * 1.364e-3, 0.645, 0.0)};
            c.seed = 1;
            return c;
        }

        std::vector<double> case3_offsets()
        {
            // 0.5 m spacing with a 0.8 m gap between positions 4 and 5
            std::vector<double> t;
            double x = 0.0;
            for (int i = 0; i < 12; ++i)
            {
                t.push_back(x);
                x += (i == 3) ? 0.8 : 0.5;
            }
            return t;
        }
    }

    std::string_view to_string(NlosModel m)
    {
        switch (m)
        {
        case NlosModel::hybrid:
            return "hybrid";
        case NlosModel::srm:
            return "srm";
        case NlosModel::spm:
            return "spm";
        }
        return "?";
    }

    NlosModel nlos_model_from_string(std::string_view s)
    {
        if (s == "hybrid")
            return NlosModel::hybrid;
        if (s == "srm")
            return NlosModel::srm;
        if (s == "spm")
            return NlosModel::spm;
        throw config_error("unknown NLoS model '" + std::string(s) + "' (expected hybrid, srm or spm)");
    }

    void ScenarioConfig::validate() const
    {
        (void)array.geometry();
        grid.validate();
        if (!(carrier() > 0.0))
            throw config_error("scenario: carrier frequency must be positive");
        aaf_stats.validate();
        if (!(vr.min_fraction > 0.0 && vr.min_fraction <= vr.max_fraction && vr.max_fraction <= 1.0))
            throw config_error("scenario: VR fractions must satisfy 0 < min <= max <= 1");
        for (const auto &r : reflectors)
            if (!(r.plane.normal.norm() > 0.0))
                throw config_error("scenario: reflector '" + r.name + "' has a zero normal");
    }

    std::vector<std::string> preset_names()
    {
        return {"case1-los", "case1-concrete", "case1-cylinder", "case2", "case3", "case4", "synthetic-sns"};
    }

    ScenarioConfig preset(std::string_view name)
    {
        if (name == "case1-los")
            return case1_base("case1-los");

        if (name == "case1-concrete")
        {
            ScenarioConfig c = case1_base("case1-concrete");
            Reflector panel;
            panel.name = "concrete";
            panel.plane = {Vec3(1.0, 1.0, 0.0), Vec3(-1.0, -1.0, 0.0).normalized()};
            panel.loss_db = 6.0;
            c.reflectors.push_back(panel);
            return c;
        }

        if (name == "case1-cylinder")
        {
            ScenarioConfig c = case1_base("case1-cylinder");
            Scatterer cyl;
            cyl.name = "metal-cylinder";
            cyl.position = Vec3(0.9, 0.9, 0.0);
            cyl.loss_db = 20.0;
            c.scatterers.push_back(cyl);
            return c;
        }

        if (name == "case2" || name == "case3")
        {
            ScenarioConfig c;
            c.name = std::string(name);
            // Tx along the y axis, 0.3 m in front of the x = 0 wall, at 1.2 m height
            c.array = {301, 1.364e-3, Vec3::UnitY(), 0, Vec3(0.3, 2.8, 1.2)};
            c.grid = {90e9, 110e9, 2001};
            c.patterns = {AntennaPattern::omnidirectional(5.0), AntennaPattern::omnidirectional(5.0)};
            c.reflectors = lab_room();
            c.seed = 1;
            if (name == "case2")
            {
                // dummy blocks part of the LoS
                c.receivers = {Vec3(0.3 + 3.22, 2.8 + 0.2, 1.2)};
                c.los_stationarity = Stationarity::SnS;
            }
            else
            {
                // reference element at the array centre; the Rx line runs radially away from it
                c.array.reference_index = 150;
                c.array.origin = Vec3(0.3, 2.8 + 150 * 1.364e-3, 1.2);
                const Vec3 start(1.3, 3.1, 1.2);
                const Vec3 dir = (start - c.array.origin).normalized();
                for (double t : case3_offsets())
                    c.receivers.push_back(start + t * dir);
                Scatterer dummy;
                dummy.name = "dummy";
                dummy.position = Vec3(0.6, 5.6, 1.2);
                dummy.loss_db = 15.0;
                c.scatterers.push_back(dummy);
            }
            return c;
        }

        if (name == "case4")
        {
            ScenarioConfig c;
            c.name = "case4";
            c.array = {531, 1.136e-3, Vec3::UnitZ(), 0, Vec3(0.3, 3.0, 0.9)};
            c.grid = {131.4e9, 132.6e9, 241};
            c.carrier_hz = 132e9;
            c.patterns = {AntennaPattern::gaussian_lobe(Vec3::UnitX(), 23.0, deg(14.6), deg(14.6)),
                          AntennaPattern::gaussian_lobe(-Vec3::UnitX(), 25.1, deg(9.9), deg(9.9))};
            c.receivers = {Vec3(0.3 + 6.72, 3.0, 1.2)};
            c.reflectors = lab_room();
            c.seed = 1;
            return c;
        }

        if (name == "synthetic-sns")
        {
            ScenarioConfig c;
            c.name = "synthetic-sns";
            c.array = {301, 1.364e-3, Vec3::UnitX(), 0, Vec3::Zero()};
            c.grid = {90e9, 110e9, 201};
            c.patterns = {AntennaPattern::omnidirectional(5.0), AntennaPattern::omnidirectional(5.0)};
            c.receivers = {Vec3(0.7, 2.5, 0.0), Vec3(-0.8, 3.0, 0.0), Vec3(1.5, 2.0, 0.0), Vec3(0.2, 4.0, 0.0)};
            for (int i = 0; i < 19; ++i)
            {
                Scatterer s;
                s.name = "scatterer-" + std::to_string(i);
                double a = deg(20.0 + 140.0 * double(i) / 18.0);
                double r = 1.5 + 0.5 * double((i * 7) % 5);
                s.position = Vec3(0.2 + r * std::cos(a), r * std::sin(a), 0.3 * double(i % 3 - 1));
                s.loss_db = 10.0 + 2.0 * double(i % 4);
                s.phase = 2.0 * pi * double((i * 5) % 19) / 19.0;
                c.scatterers.push_back(s);
            }
            c.seed = 1;
            return c;
        }

        std::string known;
        for (const auto &n : preset_names())
            known += (known.empty() ? "" : ", ") + n;
        throw config_error("unknown scenario preset '" + std::string(name) + "' (known: " + known + ")");
    }

    PathSet build_paths(const ScenarioConfig &config)
    {
        config.validate();
        if (config.receivers.empty())
            throw config_error("scenario: no receivers defined");

        const ArrayGeometry geom = config.array.geometry();
        const Vec3 tx = geom.origin();
        const double lambda = wavelength(config.carrier());

        auto unit = [](const Vec3 &v, const std::string &what)
        {
            double n = v.norm();
            if (!(n > 1e-12))
                throw geometry_error(what + ": degenerate geometry (zero-length segment)");
            return Vec3(v / n);
        };

        PathSet out;
        for (std::size_t n = 0; n < config.receivers.size(); ++n)
        {
            const Vec3 &rx = config.receivers[n];
            const std::string ue = "receiver " + std::to_string(n);
            std::vector<PathRecord> paths;

            if (config.include_los)
            {
                Vec3 v = rx - tx;
                Vec3 u = unit(v, ue + ", LoS path");
                PathRecord p;
                p.distance = v.norm();
                p.delay = p.distance / speed_of_light;
                p.amplitude = friis_amplitude(lambda, p.distance, 0.0);
                p.aod = angles_from_vector(u);
                p.aoa = angles_from_vector(-u);
                p.model = WavefrontModel::LoS;
                p.stationarity = config.los_stationarity;
                paths.push_back(p);
            }

            for (const auto &r : config.reflectors)
            {
                const std::string what = ue + ", reflector '" + r.name + "'";
                Plane plane{r.plane.point, r.plane.normal.normalized()};
                double s_tx = plane.signed_distance(tx), s_rx = plane.signed_distance(rx);
                if (!(s_tx * s_rx > 0.0))
                    throw geometry_error(what + ": transmitter and receiver are not on the same side of the surface");
                Vec3 image = mirror_point(rx, plane);
                Vec3 v = image - tx;
                Vec3 u = unit(v, what);
                // specular point: where the Tx -> image segment crosses the plane
                Vec3 hit = tx + v * (s_tx / (s_tx + s_rx));
                PathRecord p;
                p.distance = v.norm();
                p.delay = p.distance / speed_of_light;
                p.amplitude = friis_amplitude(lambda, p.distance, r.loss_db);
                p.phase = r.phase;
                p.aod = angles_from_vector(u);
                p.aoa = angles_from_vector(unit(hit - rx, what));
                p.model = WavefrontModel::SRM;
                p.stationarity = r.stationarity;
                if (config.nlos_model == NlosModel::spm)
                {
                    p.model = WavefrontModel::SPM;
                    p.distance = (hit - tx).norm();
                }
                paths.push_back(p);
            }

            for (const auto &s : config.scatterers)
            {
                const std::string what = ue + ", scatterer '" + s.name + "'";
                Vec3 d1 = s.position - tx, d2 = rx - s.position;
                Vec3 u = unit(d1, what);
                (void)unit(d2, what);
                double total = d1.norm() + d2.norm();
                PathRecord p;
                p.distance = d1.norm();
                p.delay = total / speed_of_light;
                p.amplitude = friis_amplitude(lambda, total, s.loss_db);
                p.phase = s.phase;
                p.aod = angles_from_vector(u);
                p.aoa = angles_from_vector(unit(s.position - rx, what));
                p.model = WavefrontModel::SPM;
                p.stationarity = s.stationarity;
                if (config.nlos_model == NlosModel::srm)
                {
                    // facet oriented for a specular bounce at the scatterer: image lies on the Tx ray
                    p.model = WavefrontModel::SRM;
                    p.distance = total;
                }
                paths.push_back(p);
            }
            out.ues.push_back(std::move(paths));
        }
        return out;
    }

    SynthesisResult synthesize(const ScenarioConfig &config, const PathSet &paths)
    {
        config.validate();
        if (paths.ues.empty())
            throw config_error("synthesize: path set contains no UEs");

        const ArrayGeometry geom = config.array.geometry();
        const std::size_t M = geom.size();
        const ModelVariant variant = config.variant;
        const bool stationary_variant = variant == ModelVariant::NF_SS || variant == ModelVariant::FF_SS;

        SynthesisResult out;
        std::vector<ChannelTensor> per_ue;
        for (std::size_t n = 0; n < paths.ues.size(); ++n)
        {
            const auto &ue_paths = paths.ues[n];
            if (ue_paths.empty())
                throw config_error("synthesize: UE " + std::to_string(n) + " has no paths");

            AAFMatrix S = AAFMatrix::Ones(Eigen::Index(M), Eigen::Index(ue_paths.size()));
            for (std::size_t l = 0; l < ue_paths.size(); ++l)
            {
                const PathRecord &p = ue_paths[l];
                validate(p, M);
                if (stationary_variant || p.stationarity == Stationarity::SS)
                    continue;

                std::vector<double> s;
                if (p.aaf_override)
                    s = *p.aaf_override;
                else
                {
                    if (!config.seed)
                        throw config_error("synthesize: variant " + std::string(to_string(variant)) +
                                           " with SnS paths requires a seed");
                    Rng rng = derive_rng(*config.seed, n, l);
                    if (variant == ModelVariant::VR)
                    {
                        std::uniform_real_distribution<double> frac(config.vr.min_fraction, config.vr.max_fraction);
                        std::size_t len = std::clamp<std::size_t>(std::size_t(std::lround(frac(rng) * double(M))), 1, M);
                        std::uniform_int_distribution<std::size_t> start(0, M - len);
                        std::size_t b = start(rng);
                        s = vr_aaf(M, {b, b + len});
                    }
                    else
                    {
                        AAFParams prm = sample_aaf_params(config.aaf_stats, rng);
                        // reference amplitude taken as the array maximum, so the max- and
                        // reference-normalized AAFs coincide
                        s = generate_aaf(M, prm.p, prm.q, prm.d_corr, rng);
                        out.aaf_params.push_back(prm);
                    }
                }
                for (std::size_t m = 0; m < M; ++m)
                    S(Eigen::Index(m), Eigen::Index(l)) = s[m];
            }

            auto variant_paths = apply_variant_wavefront(ue_paths, variant);
            per_ue.push_back(assemble(variant_paths, geom, config.patterns, config.grid, S, config.carrier()));
            out.paths.push_back(path_domain(variant_paths, geom, config.patterns, S, config.carrier()));
            out.aaf.push_back(std::move(S));
        }

        out.channel = multi_user(per_ue);
        out.channel.meta.seed = config.seed.value_or(0);
        out.channel.meta.variant = variant;
        out.channel.meta.config_hash = config_hash(config);
        return out;
    }
}
