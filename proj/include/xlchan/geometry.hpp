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

#ifndef XLCHAN_GEOMETRY_HPP
#define XLCHAN_GEOMETRY_HPP

#include <Eigen/Core>
#include <cstddef>

// Coordinate convention: right-handed, z-up. Elevation is measured from +z (zenith),
// azimuth from +x in the x-y plane.

namespace xlchan
{
    using Vec3 = Eigen::Vector3d;

    constexpr double speed_of_light = 299792458.0; // m/s
    constexpr double pi = 3.14159265358979323846;

    struct Angles
    {
        double azimuth = 0.0;   // (-pi, pi]
        double elevation = 0.0; // [0, pi]

        bool operator==(const Angles &) const = default;
    };

    struct Plane
    {
        Vec3 point = Vec3::Zero();
        Vec3 normal = Vec3::UnitZ(); // unit length

        // Positive on the side the normal points to
        double signed_distance(const Vec3 &p) const { return (p - point).dot(normal); }
    };

    // Uniform linear array. Element m sits at origin + (m - reference_index) * spacing * axis,
    // so "origin" is the position of the reference element.
    class ArrayGeometry
    {
    public:
        ArrayGeometry(std::size_t num_elements, double spacing,
                      const Vec3 &axis = Vec3::UnitX(),
                      std::size_t reference_index = 0,
                      const Vec3 &origin = Vec3::Zero());

        std::size_t size() const { return num_elements_; }
        double spacing() const { return spacing_; }
        const Vec3 &axis() const { return axis_; }
        std::size_t reference_index() const { return reference_index_; }
        const Vec3 &origin() const { return origin_; }

        Vec3 position(std::size_t m) const { return origin_ + offset(m); }

        // r_m: vector from the reference element to element m
        Vec3 offset(std::size_t m) const;

        // D = (M - 1) * spacing
        double aperture() const { return double(num_elements_ - 1) * spacing_; }

    private:
        std::size_t num_elements_;
        double spacing_;
        Vec3 axis_;
        std::size_t reference_index_;
        Vec3 origin_;
    };

    // [sin(el) cos(az), sin(el) sin(az), cos(el)]
    Vec3 direction_vector(const Angles &angles);

    // Inverse of direction_vector; azimuth is 0 at the poles. Throws config_error on non-unit input.
    Angles angles_from_vector(const Vec3 &v);

    // || d_ref * aod_ref - r_m ||, throws geometry_error if the element coincides with the source point
    double element_distance(double d_ref, const Vec3 &aod_ref, const Vec3 &r_m);

    // Reflection of p across the plane
    Vec3 mirror_point(const Vec3 &p, const Plane &plane);

    // 2 D^2 f / c
    double rayleigh_distance(double aperture, double frequency);
    double rayleigh_distance(const ArrayGeometry &geom, double frequency);

    inline double wavelength(double frequency) { return speed_of_light / frequency; }
}

#endif
