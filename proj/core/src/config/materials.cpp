#include "aloof/config/materials.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

namespace aloof::config {

physics::Material material_from_section(const IniSection& section) {
    section.reject_unknown({"resistivity", "temperature", "background_permittivity",
                            "drude_damping", "effective_mass_ratio", "screening_permittivity",
                            "fermi_wavevector", "carrier_density", "howie_cutoff"});
    physics::MaterialSpec spec;
    spec.name = section.name();
    spec.resistivity = section.require_quantity("resistivity", Dimension::resistivity);
    spec.temperature = section.quantity("temperature", Dimension::temperature)
                           .value_or(physics::room_temperature);
    spec.background_permittivity =
        section.quantity("background_permittivity", Dimension::dimensionless).value_or(1.0);
    spec.drude_damping = section.quantity("drude_damping", Dimension::angular_frequency);

    const auto mass = section.quantity("effective_mass_ratio", Dimension::dimensionless);
    const auto screening = section.quantity("screening_permittivity", Dimension::dimensionless);
    auto kf = section.quantity("fermi_wavevector", Dimension::inverse_length);
    if (const auto n = section.quantity("carrier_density", Dimension::number_density)) {
        if (kf)
            section.fail("carrier_density", "give either fermi_wavevector or carrier_density");
        if (!(*n > 0.0))
            section.fail("carrier_density", "must be positive");
        kf = physics::fermi_wavevector_from_density(*n);
    }
    const int present = int(mass.has_value()) + int(screening.has_value()) + int(kf.has_value());
    if (present == 3)
        spec.machnikowski = physics::MachnikowskiParams{*mass, *screening, *kf};
    else if (present != 0)
        section.fail({}, "effective_mass_ratio, screening_permittivity and fermi_wavevector "
                         "(or carrier_density) must be given together");

    spec.howie_cutoff = section.quantity("howie_cutoff", Dimension::angular_frequency)
                            .value_or(physics::dielectric_relaxation_frequency(
                                1.0 / spec.resistivity, spec.background_permittivity));
    try {
        return physics::Material(std::move(spec));
    } catch (const ConfigError& e) {
        section.fail({}, e.what());
    }
}

std::vector<physics::Material> load_materials(const IniDocument& document) {
    std::vector<physics::Material> out;
    for (const auto& name : document.section_names())
        out.push_back(material_from_section(document.section(name)));
    return out;
}

physics::Material resolve_material(const std::string& name_or_path, const std::string& section) {
    for (const auto& name : physics::bundled_material_names())
        if (name == name_or_path)
            return physics::bundled_material(name);
    if (name_or_path == "silicon")
        return physics::silicon_n_doped();
    const std::filesystem::path path(name_or_path);
    if (!std::filesystem::exists(path))
        throw ConfigError(fmt::format("'{}' is neither a bundled material nor a file",
                                      name_or_path));
    const auto doc = IniDocument::load(path);
    if (doc.section_names().empty())
        throw ConfigError(fmt::format("{}: no material sections", path.string()));
    return material_from_section(doc.section(section.empty() ? doc.section_names().front()
                                                             : section));
}

} // namespace aloof::config
