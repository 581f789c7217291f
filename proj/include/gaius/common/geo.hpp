#pragma once

namespace gaius {

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    bool valid() const noexcept {
        return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
    }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr double kEarthRadiusKm = 6371.0;

// Great-circle distance on a spherical Earth.
double haversine_km(const GeoPoint& a, const GeoPoint& b) noexcept;

}  // namespace gaius
