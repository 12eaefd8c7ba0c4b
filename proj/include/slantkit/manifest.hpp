#pragma once

// Checked-in identity manifest: one tab-separated line per registry key with its
// topic, formula and applicable settings. Cross-checked against the compiled registry.

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slantkit/errors.hpp"
#include "slantkit/identities.hpp"

namespace slantkit {

struct ManifestEntry {
    std::string key;
    std::string topic;
    std::string statement;
    std::string settings;
    std::size_t line = 0;
};

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) return out;
        start = tab + 1;
    }
}

// Lines starting with '#' and blank lines are ignored. The first non-comment line
// is the header row.
inline std::vector<ManifestEntry> parse_manifest(std::istream& in) {
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t number = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto cols = split_tabs(line);
        if (header) {
            header = false;
            if (cols.size() != 4 || cols[0] != "key") throw SpecError("manifest line " + std::to_string(number) + ": bad header");
            continue;
        }
        if (cols.size() > 4) throw SpecError("manifest line " + std::to_string(number) + ": expected 4 columns");
        cols.resize(4);
        entries.push_back({cols[0], cols[1], cols[2], cols[3], number});
    }
    return entries;
}

inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot read manifest " + path);
    return parse_manifest(in);
}

inline std::string settings_text(Setting s) {
    switch (s) {
        case Setting::contact:
            return "contact-like";
        case Setting::hermitian:
            return "hermitian-like";
        case Setting::any:
            break;
    }
    return "contact-like,hermitian-like";
}

struct ManifestCheck {
    std::vector<std::string> missing;       // in registry, not in manifest
    std::vector<std::string> extra;         // in manifest, not in registry
    std::vector<std::string> duplicates;
    std::vector<std::string> no_statement;
    std::vector<std::string> setting_mismatch;

    [[nodiscard]] bool passed() const {
        return missing.empty() && extra.empty() && duplicates.empty() && no_statement.empty() && setting_mismatch.empty();
    }
    [[nodiscard]] std::string summary() const {
        std::ostringstream out;
        const auto list = [&](const char* what, const std::vector<std::string>& keys) {
            if (keys.empty()) return;
            out << what << ":";
            for (const auto& k : keys) out << " " << k;
            out << "\n";
        };
        list("missing", missing);
        list("extra", extra);
        list("duplicate", duplicates);
        list("no statement", no_statement);
        list("setting mismatch", setting_mismatch);
        return out.str();
    }
};

inline ManifestCheck manifest_check(const std::vector<ManifestEntry>& manifest,
                                    const std::vector<IdentityCase>& registry = identity_registry()) {
    ManifestCheck out;
    std::map<std::string, const ManifestEntry*> by_key;
    for (const auto& e : manifest) {
        if (!by_key.emplace(e.key, &e).second) out.duplicates.push_back(e.key);
        if (e.statement.empty()) out.no_statement.push_back(e.key);
    }
    std::set<std::string> known;
    for (const auto& c : registry) {
        known.insert(c.key);
        const auto it = by_key.find(c.key);
        if (it == by_key.end()) {
            out.missing.push_back(c.key);
        } else if (it->second->settings != settings_text(c.setting)) {
            out.setting_mismatch.push_back(c.key);
        }
    }
    for (const auto& e : manifest)
        if (!known.count(e.key)) out.extra.push_back(e.key);
    return out;
}

inline std::string render_manifest(const std::vector<IdentityCase>& registry = identity_registry()) {
    std::string out = "key\ttopic\tstatement\tsettings\n";
    for (const auto& c : registry) out += c.key + "\t" + c.topic + "\t" + c.statement + "\t" + settings_text(c.setting) + "\n";
    return out;
}

}  // namespace slantkit
