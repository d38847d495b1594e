#include "ctrltab/core/generation_io.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"

#include <nlohmann/json.hpp>

namespace ctrltab {

std::string format_generation(const GenerationRecord& rec) {
    nlohmann::ordered_json j;
    j["pair_id"] = rec.pair_id;
    j["output"] = rec.output;
    j["retrieved"] = rec.retrieved;
    j["decode"] = {{"strategy", rec.strategy}, {"beam_width", rec.beam_width}};
    return j.dump();
}

std::string format_generations(const std::vector<GenerationRecord>& recs) {
    std::string out;
    for (const auto& r : recs) out += format_generation(r) + "\n";
    return out;
}

std::vector<GenerationRecord> parse_generations(std::string_view text) {
    std::vector<GenerationRecord> out;
    util::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        try {
            const auto j = nlohmann::json::parse(line);
            GenerationRecord r;
            r.pair_id = j.at("pair_id").get<std::string>();
            r.output = j.at("output").get<std::string>();
            if (auto it = j.find("retrieved"); it != j.end()) r.retrieved = it->get<std::vector<std::string>>();
            if (auto it = j.find("decode"); it != j.end()) {
                r.strategy = it->value("strategy", r.strategy);
                r.beam_width = it->value("beam_width", r.beam_width);
            }
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": malformed generation record: " + e.what(),
                             line_no);
        }
    });
    return out;
}

std::vector<GenerationRecord> read_generations(const std::string& path) {
    return parse_generations(util::read_file(path));
}

} // namespace ctrltab
