#include "aloof/config/ini.hpp"

#include "aloof/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace aloof::config {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string location(const std::string& source, std::size_t line) {
    return line ? fmt::format("{}:{}", source, line) : source;
}

} // namespace

IniSection::IniSection(std::string source, std::string name, const pt::ptree* tree,
                       std::size_t line, std::map<std::string, std::size_t> key_lines)
    : source_(std::move(source)), name_(std::move(name)), tree_(tree), line_(line),
      key_lines_(std::move(key_lines)) {}

std::vector<std::string> IniSection::keys() const {
    std::vector<std::string> out;
    for (const auto& [key, child] : *tree_)
        out.push_back(key);
    return out;
}

bool IniSection::has(const std::string& key) const { return tree_->find(key) != tree_->not_found(); }

std::optional<std::string> IniSection::get(const std::string& key) const {
    const auto it = tree_->find(key);
    if (it == tree_->not_found())
        return std::nullopt;
    return trim(it->second.data());
}

std::string IniSection::require(const std::string& key) const {
    auto v = get(key);
    if (!v)
        fail({}, fmt::format("missing required key '{}'", key));
    return *v;
}

std::optional<double> IniSection::quantity(const std::string& key, Dimension dimension) const {
    const auto v = get(key);
    if (!v)
        return std::nullopt;
    try {
        return parse_quantity(*v, dimension);
    } catch (const ConfigError& e) {
        fail(key, e.what());
    }
}

double IniSection::require_quantity(const std::string& key, Dimension dimension) const {
    if (!has(key))
        fail({}, fmt::format("missing required key '{}'", key));
    return *quantity(key, dimension);
}

std::optional<long long> IniSection::integer(const std::string& key) const {
    const auto v = get(key);
    if (!v)
        return std::nullopt;
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(*v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v->size())
        fail(key, fmt::format("'{}' is not an integer", *v));
    return value;
}

void IniSection::reject_unknown(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, child] : *tree_)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(key, fmt::format("unknown key '{}'", key));
}

void IniSection::fail(const std::string& key, const std::string& message) const {
    std::size_t line = line_;
    if (!key.empty())
        if (const auto it = key_lines_.find(key); it != key_lines_.end())
            line = it->second;
    const std::string where = key.empty() ? fmt::format("[{}]", name_)
                                          : fmt::format("[{}] {}", name_, key);
    throw ConfigError(fmt::format("{}: {}: {}", location(source_, line), where, message), line);
}

IniDocument IniDocument::parse(std::istream& in, const std::string& source_name) {
    IniDocument doc;
    doc.source_ = source_name;
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::istringstream stream(text);
    try {
        pt::read_ini(stream, doc.tree_);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("{}: {}", location(source_name, e.line()), e.message()),
                          e.line());
    }

    // The property tree forgets line numbers; recover them for messages.
    std::istringstream lines(text);
    std::string raw;
    std::string current;
    std::size_t number = 0;
    while (std::getline(lines, raw)) {
        ++number;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == ';' || s[0] == '#')
            continue;
        if (s.front() == '[' && s.back() == ']') {
            current = trim(s.substr(1, s.size() - 2));
            doc.section_lines_[current] = number;
            continue;
        }
        if (const auto eq = s.find('='); eq != std::string::npos)
            doc.key_lines_[current][trim(s.substr(0, eq))] = number;
    }

    for (const auto& [name, child] : doc.tree_) {
        if (doc.section_lines_.count(name) == 0) {
            const std::size_t line = doc.key_lines_[""][name];
            throw ConfigError(fmt::format("{}: key '{}' outside any section",
                                          location(source_name, line), name),
                              line);
        }
        doc.order_.push_back(name);
    }
    return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    return parse(in, path.string());
}

bool IniDocument::has_section(const std::string& name) const {
    return std::find(order_.begin(), order_.end(), name) != order_.end();
}

std::optional<IniSection> IniDocument::find_section(const std::string& name) const {
    const auto it = tree_.find(name);
    if (it == tree_.not_found())
        return std::nullopt;
    const auto line = section_lines_.count(name) ? section_lines_.at(name) : 0;
    const auto keys = key_lines_.count(name) ? key_lines_.at(name)
                                             : std::map<std::string, std::size_t>{};
    return IniSection(source_, name, &it->second, line, keys);
}

IniSection IniDocument::section(const std::string& name) const {
    auto s = find_section(name);
    if (!s)
        throw ConfigError(fmt::format("{}: missing section [{}]", source_, name));
    return *s;
}

} // namespace aloof::config
