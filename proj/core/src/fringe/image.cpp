#include "aloof/fringe/image.hpp"

#include "aloof/errors.hpp"
#include "aloof/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>
#include <random>

namespace aloof::fringe {

double FringeImage::column_x(std::size_t column) const {
    return (static_cast<double>(column) - 0.5 * static_cast<double>(columns - 1)) * pixel_pitch_x;
}

double FringeImage::row_z(std::size_t row) const {
    return z_of_bottom_row + (static_cast<double>(row) + 0.5) * pixel_pitch_z;
}

double FringeImage::top_z() const {
    return z_of_bottom_row + static_cast<double>(rows) * pixel_pitch_z;
}

std::uint64_t FringeImage::sum() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

void FringeImage::validate() const {
    if (columns == 0 || rows == 0)
        throw FormatError("image has no pixels");
    if (counts.size() != columns * rows)
        throw FormatError(fmt::format("image holds {} counts, expected {} x {}", counts.size(),
                                      columns, rows));
    if (!(pixel_pitch_x > 0.0) || !(pixel_pitch_z > 0.0))
        throw FormatError("pixel pitches must be positive");
    if (!std::isfinite(z_of_bottom_row))
        throw FormatError("z origin must be finite");
}

FringeImage synthesize_image(const decoherence::VisibilityCurve& curve,
                             const FringeModelParams& base, const ImageGeometry& geometry,
                             double total_counts, std::uint64_t seed) {
    base.validate();
    if (!(total_counts > 0.0) || !std::isfinite(total_counts))
        throw DomainError("total counts must be positive");
    FringeImage image;
    image.columns = geometry.columns;
    image.rows = geometry.rows;
    image.pixel_pitch_x = geometry.pixel_pitch_x;
    image.pixel_pitch_z = geometry.pixel_pitch_z;
    image.z_of_bottom_row = geometry.z_of_bottom_row;
    image.seed = seed;
    image.total_counts = total_counts;
    image.counts.assign(image.columns * image.rows, 0);
    image.validate();

    // Expected counts before scaling, row by row.
    std::vector<double> expected(image.counts.size());
    for (std::size_t r = 0; r < image.rows; ++r) {
        FringeModelParams p = base;
        p.contrast = base.contrast * curve.visibility_at(image.row_z(r));
        for (std::size_t c = 0; c < image.columns; ++c)
            expected[r * image.columns + c] = fringe_intensity(p, image.column_x(c));
    }
    double total = 0.0;
    for (double e : expected)
        total += e;
    if (!(total > 0.0))
        throw DomainError("fringe model has zero intensity over the image");
    const double scale = total_counts / total;

    parallel_for(image.rows, [&](std::size_t r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
        std::mt19937_64 rng(seq);
        for (std::size_t c = 0; c < image.columns; ++c) {
            const double mean = expected[r * image.columns + c] * scale;
            if (mean > 0.0) {
                std::poisson_distribution<long long> poisson(mean);
                image.counts[r * image.columns + c] = static_cast<std::uint32_t>(poisson(rng));
            }
        }
    });
    return image;
}

} // namespace aloof::fringe
