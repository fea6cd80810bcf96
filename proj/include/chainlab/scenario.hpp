#pragma once

#include <map>
#include <string>
#include <vector>

#include "chainlab/engine.hpp"
#include "chainlab/errors.hpp"

namespace chainlab {

// Human-editable scenario text: `key = value` lines, with repeatable
// `[section]` blocks for coins, miners, pools, peers, attacks. `#` starts a
// comment. The exact grammar is documented in the README.
struct ScenarioDoc {
    struct KV {
        std::string key;
        std::string value;
        int line = 0;
    };
    struct Section {
        std::string name;
        std::vector<KV> entries;
        int line = 0;

        const std::string* get(const std::string& key) const {
            for (const auto& kv : entries)
                if (kv.key == key)
                    return &kv.value;
            return nullptr;
        }
        void set(const std::string& key, const std::string& value) {
            for (auto& kv : entries)
                if (kv.key == key) {
                    kv.value = value;
                    return;
                }
            entries.push_back({key, value, 0});
        }
    };
    std::vector<KV> globals;
    std::vector<Section> sections;

    const std::string* global(const std::string& key) const {
        for (const auto& kv : globals)
            if (kv.key == key)
                return &kv.value;
        return nullptr;
    }
    void set_global(const std::string& key, const std::string& value) {
        for (auto& kv : globals)
            if (kv.key == key) {
                kv.value = value;
                return;
            }
        globals.push_back({key, value, 0});
    }
};

ScenarioDoc parse_scenario_text(const std::string& text, const std::string& origin = "scenario");
ScenarioDoc parse_scenario_file(const std::string& path);

// `key`, `section.key`, or `section.name.key` (matched by the section's
// name/label entry). Used by --override and sweep parameter paths.
void apply_override(ScenarioDoc& doc, const std::string& path, const std::string& value);

// Builds the runnable setup, collecting every validation error rather than
// stopping at the first.
SimSetup build_setup(const ScenarioDoc& doc, std::vector<std::string>& errors);

// Validated parse: throws ParseError listing all problems.
SimSetup parse_scenario(const std::string& path);

std::string serialize_scenario(const ScenarioDoc& doc);
ScenarioDoc scenario_doc_from_setup(const SimSetup& setup);

} // namespace chainlab
