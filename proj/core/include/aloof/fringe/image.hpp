#pragma once

// Counts images. Row 0 is the row nearest the surface; row r spans
// [z_bottom + r pz, z_bottom + (r + 1) pz]. Columns are centred on x = 0.

#include "aloof/decoherence/curve.hpp"
#include "aloof/fringe/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace aloof::fringe {

struct FringeImage {
    std::size_t columns = 0;
    std::size_t rows = 0;
    std::vector<std::uint32_t> counts;  // row-major, row 0 first
    double pixel_pitch_x = 0.0;         // [m]
    double pixel_pitch_z = 0.0;         // [m]
    double z_of_bottom_row = 0.0;       // lower edge of row 0 [m]
    std::optional<std::uint64_t> seed;
    std::optional<double> total_counts;  // expected total used for synthesis

    std::uint32_t at(std::size_t column, std::size_t row) const { return counts[row * columns + column]; }
    double column_x(std::size_t column) const;
    double row_z(std::size_t row) const;  // row centre
    double top_z() const;
    std::uint64_t sum() const;
    void validate() const;
};

struct ImageGeometry {
    std::size_t columns = 200;
    std::size_t rows = 160;
    double pixel_pitch_x = 0.125e-6;
    double pixel_pitch_z = 0.5e-6;
    double z_of_bottom_row = 0.0;
};

/// Poisson counts whose expectation follows the fringe model with row
/// contrast base.C * V(z_row), scaled so the expected total is
/// `total_counts`. Each row draws from its own generator seeded from
/// (seed, row). Throws DomainError when the curve does not cover every
/// row centre.
FringeImage synthesize_image(const decoherence::VisibilityCurve& curve,
                             const FringeModelParams& base, const ImageGeometry& geometry,
                             double total_counts, std::uint64_t seed);

/// Binary PGM (P5, maxval 65535, big-endian), top row first. Throws
/// FormatError for counts above 65535.
void write_pgm(std::ostream& out, const FringeImage& image);
/// Reads counts only; pitches and origin come from the sidecar.
FringeImage read_pgm(std::istream& in);

/// Sidecar metadata written next to the image as `<image>.meta`.
std::filesystem::path sidecar_path(const std::filesystem::path& image_path);
void write_metadata(std::ostream& out, const FringeImage& image, const Provenance& provenance);
void apply_metadata(std::istream& in, FringeImage& image, const std::string& source_name);

void save_image(const std::filesystem::path& path, const FringeImage& image,
                const Provenance& provenance);
FringeImage load_image(const std::filesystem::path& path);

} // namespace aloof::fringe
