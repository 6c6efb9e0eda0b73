#include "selectqa/qa_data.hpp"

#include "selectqa/error.hpp"
#include "selectqa/normalize.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace selectqa {
namespace {

using nlohmann::json;

std::vector<std::string> string_array(const json& j, const std::string& field, size_t line) {
    if (!j.is_array())
        throw config_error("line " + std::to_string(line) + ": \"" + field + "\" must be an array of strings");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_string())
            throw config_error("line " + std::to_string(line) + ": \"" + field + "\" must contain only strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

QuestionRecord parse_record(const std::string& text, size_t line) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("line " + std::to_string(line) + ": invalid JSON: " + e.what());
    }
    if (!j.is_object())
        throw config_error("line " + std::to_string(line) + ": record must be a JSON object");

    QuestionRecord rec;
    if (!j.contains("id") || !j["id"].is_string())
        throw config_error("line " + std::to_string(line) + ": missing string field \"id\"");
    rec.id = j["id"].get<std::string>();
    if (!j.contains("question") || !j["question"].is_string())
        throw config_error("line " + std::to_string(line) + ": missing string field \"question\"");
    rec.question = j["question"].get<std::string>();
    if (!j.contains("answers"))
        throw config_error("line " + std::to_string(line) + ": missing field \"answers\"");
    rec.answers = string_array(j["answers"], "answers", line);
    if (rec.answers.empty())
        throw config_error("line " + std::to_string(line) + ": \"answers\" must be non-empty");

    if (j.contains("ambiguous")) {
        if (!j["ambiguous"].is_boolean())
            throw config_error("line " + std::to_string(line) + ": \"ambiguous\" must be a boolean");
        rec.ambiguous = j["ambiguous"].get<bool>();
    }
    if (j.contains("disambiguations")) {
        const auto& ds = j["disambiguations"];
        if (!ds.is_array())
            throw config_error("line " + std::to_string(line) + ": \"disambiguations\" must be an array");
        for (const auto& d : ds) {
            if (!d.is_object() || !d.contains("question") || !d["question"].is_string() || !d.contains("answers"))
                throw config_error("line " + std::to_string(line) +
                                   ": each disambiguation needs \"question\" and \"answers\"");
            Disambiguation dis;
            dis.question = d["question"].get<std::string>();
            if (dis.question.empty())
                throw config_error("line " + std::to_string(line) + ": disambiguation question must be non-empty");
            dis.answers = string_array(d["answers"], "disambiguations.answers", line);
            if (dis.answers.empty())
                throw config_error("line " + std::to_string(line) + ": disambiguation answers must be non-empty");
            rec.disambiguations.push_back(std::move(dis));
        }
    }
    if (j.contains("long_answer")) {
        if (!j["long_answer"].is_string())
            throw config_error("line " + std::to_string(line) + ": \"long_answer\" must be a string");
        rec.long_answer = j["long_answer"].get<std::string>();
    }

    if (rec.ambiguous.value_or(false) && rec.disambiguations.empty())
        throw config_error("line " + std::to_string(line) +
                           ": ambiguous=true requires at least one disambiguation (id \"" + rec.id + "\")");
    return rec;
}

} // namespace

std::vector<QuestionRecord> parse_dataset(const std::string& content) {
    std::vector<QuestionRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::istringstream in(content);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        QuestionRecord rec = parse_record(line, line_no);
        if (!seen_ids.insert(rec.id).second)
            throw config_error("line " + std::to_string(line_no) + ": duplicate id \"" + rec.id + "\"");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<QuestionRecord> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

bool is_correct(const std::string& answer, const QuestionRecord& record) {
    const std::string norm = normalize(answer);
    for (const auto& gold : record.answers)
        if (norm == normalize(gold)) return true;
    for (const auto& dis : record.disambiguations)
        for (const auto& gold : dis.answers)
            if (norm == normalize(gold)) return true;
    return false;
}

} // namespace selectqa
