#pragma once

// INI files: `[section]` headers, `key = value` lines, `;` or `#` comments.
// Section order is preserved; duplicate sections or keys are errors.

#include "aloof/config/units.hpp"

#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aloof::config {

class IniSection {
public:
    IniSection(std::string source, std::string name, const boost::property_tree::ptree* tree,
               std::size_t line, std::map<std::string, std::size_t> key_lines);

    const std::string& name() const noexcept { return name_; }
    std::size_t line() const noexcept { return line_; }
    std::vector<std::string> keys() const;
    bool has(const std::string& key) const;

    std::optional<std::string> get(const std::string& key) const;
    std::string require(const std::string& key) const;
    std::optional<double> quantity(const std::string& key, Dimension dimension) const;
    double require_quantity(const std::string& key, Dimension dimension) const;
    std::optional<long long> integer(const std::string& key) const;

    /// Throws ConfigError naming the first key not in `allowed`.
    void reject_unknown(std::initializer_list<std::string_view> allowed) const;

    /// ConfigError located at `key` (or at the section header).
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    std::string source_;
    std::string name_;
    const boost::property_tree::ptree* tree_;
    std::size_t line_;
    std::map<std::string, std::size_t> key_lines_;
};

class IniDocument {
public:
    static IniDocument parse(std::istream& in, const std::string& source_name = "<input>");
    static IniDocument load(const std::filesystem::path& path);

    const std::string& source() const noexcept { return source_; }
    /// Section names in file order.
    const std::vector<std::string>& section_names() const noexcept { return order_; }
    bool has_section(const std::string& name) const;
    IniSection section(const std::string& name) const;
    std::optional<IniSection> find_section(const std::string& name) const;

private:
    std::string source_;
    boost::property_tree::ptree tree_;
    std::vector<std::string> order_;
    std::map<std::string, std::size_t> section_lines_;
    std::map<std::string, std::map<std::string, std::size_t>> key_lines_;
};

} // namespace aloof::config
