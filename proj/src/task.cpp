#include "lcl/task.hpp"

#include <fstream>

#include <json.hpp>

#include "lcl/errors.hpp"

namespace lcl {

using nlohmann::json;

const char* task_type_name(TaskType t) {
    switch (t) {
        case TaskType::Qa: return "qa";
        case TaskType::Mc: return "mc";
        case TaskType::Summ: return "summ";
        case TaskType::Dialogue: return "dialogue";
    }
    return "qa";
}

const char* metric_name(MetricKind m) {
    switch (m) {
        case MetricKind::F1: return "f1";
        case MetricKind::Em: return "em";
        case MetricKind::RougeLSum: return "rougeLsum";
        case MetricKind::RougeGeo: return "rougeGeo";
        case MetricKind::Mc: return "mc";
    }
    return "f1";
}

TaskType task_type_from_name(const std::string& s) {
    if (s == "qa") return TaskType::Qa;
    if (s == "mc") return TaskType::Mc;
    if (s == "summ") return TaskType::Summ;
    if (s == "dialogue") return TaskType::Dialogue;
    throw ArgumentError("unknown task type: " + s);
}

MetricKind metric_from_name(const std::string& s) {
    if (s == "f1") return MetricKind::F1;
    if (s == "em") return MetricKind::Em;
    if (s == "rougeLsum") return MetricKind::RougeLSum;
    if (s == "rougeGeo") return MetricKind::RougeGeo;
    if (s == "mc") return MetricKind::Mc;
    throw ArgumentError("unknown metric: " + s);
}

std::vector<EvalTask> read_jsonl_tasks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tasks file: " + path);
    std::vector<EvalTask> tasks;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw DataError(path + ":" + std::to_string(lineno) + ": invalid JSON");
        }
        EvalTask t;
        t.id = j.at("id").get<std::string>();
        t.document = j.at("document").get<std::string>();
        t.question = j.value("question", std::string{});
        if (j.contains("answers")) t.answers = j["answers"].get<std::vector<std::string>>();
        if (j.contains("choices")) {
            t.choices = j["choices"].get<std::vector<std::string>>();
            t.correct_choice = j.value("correct_choice", std::size_t{0});
        }
        t.type = task_type_from_name(j.value("task_type", std::string{"qa"}));
        t.metric = metric_from_name(j.value("metric", std::string{"f1"}));
        if (t.answers.empty() && t.type != TaskType::Mc) {
            throw DataError(path + ":" + std::to_string(lineno) + ": task needs answers");
        }
        tasks.push_back(std::move(t));
    }
    return tasks;
}

void write_jsonl_tasks(const std::vector<EvalTask>& tasks, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write tasks file: " + path);
    for (const auto& t : tasks) {
        json j;
        j["id"] = t.id;
        j["document"] = t.document;
        j["question"] = t.question;
        j["answers"] = t.answers;
        if (!t.choices.empty()) {
            j["choices"] = t.choices;
            j["correct_choice"] = t.correct_choice;
        }
        j["task_type"] = task_type_name(t.type);
        j["metric"] = metric_name(t.metric);
        out << j.dump() << "\n";
    }
}

}  // namespace lcl
