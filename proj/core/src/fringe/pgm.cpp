#include "aloof/errors.hpp"
#include "aloof/config/ini.hpp"
#include "aloof/fringe/image.hpp"

#include <fmt/format.h>

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

namespace aloof::fringe {

void write_pgm(std::ostream& out, const FringeImage& image) {
    image.validate();
    out << "P5\n" << image.columns << ' ' << image.rows << "\n65535\n";
    std::vector<char> row(2 * image.columns);
    for (std::size_t r = image.rows; r-- > 0;) {
        for (std::size_t c = 0; c < image.columns; ++c) {
            const std::uint32_t v = image.at(c, r);
            if (v > 65535)
                throw FormatError(fmt::format("count {} at ({}, {}) exceeds 16 bits", v, c, r));
            row[2 * c] = static_cast<char>(v >> 8);
            row[2 * c + 1] = static_cast<char>(v & 0xff);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw FormatError("failed to write PGM data");
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (!std::isspace(ch)) {
            token.push_back(static_cast<char>(ch));
            break;
        }
    }
    while ((ch = in.peek()) != EOF && !std::isspace(ch))
        token.push_back(static_cast<char>(in.get()));
    if (token.empty())
        throw FormatError("truncated PGM header");
    return token;
}

std::size_t header_number(std::istream& in, const char* what) {
    const std::string t = header_token(in);
    std::size_t value = 0;
    for (char c : t) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw FormatError(fmt::format("PGM {} '{}' is not a number", what, t));
        value = value * 10 + static_cast<std::size_t>(c - '0');
        if (value > (std::size_t{1} << 32))
            throw FormatError(fmt::format("PGM {} is too large", what));
    }
    return value;
}

} // namespace

FringeImage read_pgm(std::istream& in) {
    if (header_token(in) != "P5")
        throw FormatError("not a binary PGM (missing P5 magic)");
    FringeImage image;
    image.columns = header_number(in, "width");
    image.rows = header_number(in, "height");
    const std::size_t maxval = header_number(in, "maxval");
    if (image.columns == 0 || image.rows == 0)
        throw FormatError("PGM has zero size");
    if (maxval == 0 || maxval > 65535)
        throw FormatError(fmt::format("unsupported PGM maxval {}", maxval));
    if (!std::isspace(in.get()))
        throw FormatError("malformed PGM header");
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    image.counts.assign(image.columns * image.rows, 0);
    std::vector<unsigned char> row(bytes_per_sample * image.columns);
    for (std::size_t r = image.rows; r-- > 0;) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (in.gcount() != static_cast<std::streamsize>(row.size()))
            throw FormatError(fmt::format("truncated PGM data: expected {} rows", image.rows));
        for (std::size_t c = 0; c < image.columns; ++c) {
            const std::uint32_t v = bytes_per_sample == 2
                ? (std::uint32_t{row[2 * c]} << 8) | row[2 * c + 1]
                : row[c];
            if (v > maxval)
                throw FormatError("PGM sample exceeds maxval");
            image.counts[r * image.columns + c] = v;
        }
    }
    return image;
}

std::filesystem::path sidecar_path(const std::filesystem::path& image_path) {
    auto p = image_path;
    p += ".meta";
    return p;
}

void write_metadata(std::ostream& out, const FringeImage& image, const Provenance& provenance) {
    for (const auto& [key, value] : provenance)
        out << "; " << key << '=' << value << '\n';
    out << "[image]\n";
    out << "columns = " << image.columns << '\n';
    out << "rows = " << image.rows << '\n';
    out << "pixel_pitch_x = " << format_number(image.pixel_pitch_x) << '\n';
    out << "pixel_pitch_z = " << format_number(image.pixel_pitch_z) << '\n';
    out << "z_of_bottom_row = " << format_number(image.z_of_bottom_row) << '\n';
    if (image.seed)
        out << "seed = " << *image.seed << '\n';
    if (image.total_counts)
        out << "total_counts = " << format_number(*image.total_counts) << '\n';
}

void apply_metadata(std::istream& in, FringeImage& image, const std::string& source_name) {
    using config::Dimension;
    const auto doc = config::IniDocument::parse(in, source_name);
    const auto s = doc.section("image");
    s.reject_unknown({"columns", "rows", "pixel_pitch_x", "pixel_pitch_z", "z_of_bottom_row",
                      "seed", "total_counts"});
    if (const auto c = s.integer("columns"); c && static_cast<std::size_t>(*c) != image.columns)
        s.fail("columns", fmt::format("metadata says {}, image has {}", *c, image.columns));
    if (const auto r = s.integer("rows"); r && static_cast<std::size_t>(*r) != image.rows)
        s.fail("rows", fmt::format("metadata says {}, image has {}", *r, image.rows));
    image.pixel_pitch_x = s.require_quantity("pixel_pitch_x", Dimension::length);
    image.pixel_pitch_z = s.require_quantity("pixel_pitch_z", Dimension::length);
    image.z_of_bottom_row = s.quantity("z_of_bottom_row", Dimension::length).value_or(0.0);
    if (const auto seed = s.integer("seed"))
        image.seed = static_cast<std::uint64_t>(*seed);
    image.total_counts = s.quantity("total_counts", Dimension::dimensionless);
    try {
        image.validate();
    } catch (const FormatError& e) {
        s.fail({}, e.what());
    }
}

void save_image(const std::filesystem::path& path, const FringeImage& image,
                const Provenance& provenance) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw FormatError(fmt::format("cannot write '{}'", path.string()));
        write_pgm(out, image);
    }
    std::ofstream meta(sidecar_path(path), std::ios::binary);
    if (!meta)
        throw FormatError(fmt::format("cannot write '{}'", sidecar_path(path).string()));
    write_metadata(meta, image, provenance);
}

FringeImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(fmt::format("cannot open '{}'", path.string()));
    FringeImage image;
    try {
        image = read_pgm(in);
    } catch (const FormatError& e) {
        throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
    }
    const auto meta_path = sidecar_path(path);
    std::ifstream meta(meta_path, std::ios::binary);
    if (!meta)
        throw FormatError(fmt::format("missing metadata sidecar '{}'", meta_path.string()));
    try {
        apply_metadata(meta, image, meta_path.string());
    } catch (const ConfigError& e) {
        throw FormatError(e.what());
    }
    return image;
}

} // namespace aloof::fringe
