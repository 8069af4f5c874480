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

#include "xlchan/geometry.hpp"
#include "xlchan/errors.hpp"

#include <cmath>
#include <string>

namespace xlchan
{
    ArrayGeometry::ArrayGeometry(std::size_t num_elements, double spacing, const Vec3 &axis,
                                 std::size_t reference_index, const Vec3 &origin)
        : num_elements_(num_elements), spacing_(spacing), axis_(axis),
          reference_index_(reference_index), origin_(origin)
    {
        if (num_elements_ == 0)
            throw config_error("ArrayGeometry: number of elements must be at least 1");
        if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
            throw config_error("ArrayGeometry: element spacing must be positive");
        if (reference_index_ >= num_elements_)
            throw config_error("ArrayGeometry: reference index " + std::to_string(reference_index_) +
                               " outside [0, " + std::to_string(num_elements_) + ")");
        double n = axis_.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw config_error("ArrayGeometry: array axis must be a non-zero vector");
        axis_ /= n;
    }

    Vec3 ArrayGeometry::offset(std::size_t m) const
    {
        double k = double(m) - double(reference_index_);
        return k * spacing_ * axis_;
    }

    Vec3 direction_vector(const Angles &angles)
    {
        double st = std::sin(angles.elevation);
        return {st * std::cos(angles.azimuth), st * std::sin(angles.azimuth), std::cos(angles.elevation)};
    }

    Angles angles_from_vector(const Vec3 &v)
    {
        double n = v.norm();
        if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-9)
            throw config_error("angles_from_vector: input is not a unit vector (norm " + std::to_string(n) + ")");

        Vec3 u = v / n;
        Angles a;
        double rho = std::hypot(u.x(), u.y());
        a.elevation = std::atan2(rho, u.z());
        a.azimuth = rho > 0.0 ? std::atan2(u.y(), u.x()) : 0.0;
        if (a.azimuth == -pi)
            a.azimuth = pi;
        return a;
    }

    double element_distance(double d_ref, const Vec3 &aod_ref, const Vec3 &r_m)
    {
        if (!(d_ref > 0.0))
            throw config_error("element_distance: reference distance must be positive");
        double d = (d_ref * aod_ref - r_m).norm();
        if (!(d > 0.0))
            throw geometry_error("element_distance: array element coincides with the source point");
        return d;
    }

    Vec3 mirror_point(const Vec3 &p, const Plane &plane)
    {
        Vec3 n = plane.normal.normalized();
        return p - 2.0 * (p - plane.point).dot(n) * n;
    }

    double rayleigh_distance(double aperture, double frequency)
    {
        if (!(aperture > 0.0) || !(frequency > 0.0))
            throw config_error("rayleigh_distance: aperture and frequency must be positive");
        return 2.0 * aperture * aperture * frequency / speed_of_light;
    }

    double rayleigh_distance(const ArrayGeometry &geom, double frequency)
    {
        return rayleigh_distance(geom.aperture(), frequency);
    }
}
