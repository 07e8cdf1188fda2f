#pragma once

#include <string>
#include <vector>

namespace lcl {

enum class TaskType { Qa, Mc, Summ, Dialogue };
enum class MetricKind { F1, Em, RougeLSum, RougeGeo, Mc };

struct EvalTask {
    std::string id;
    std::string document;
    std::string question;  // empty for pure summarization
    std::vector<std::string> answers;
    std::vector<std::string> choices;  // multiple choice only
    std::size_t correct_choice = 0;
    TaskType type = TaskType::Qa;
    MetricKind metric = MetricKind::F1;
};

const char* task_type_name(TaskType t);
const char* metric_name(MetricKind m);
TaskType task_type_from_name(const std::string& s);    // throws ArgumentError
MetricKind metric_from_name(const std::string& s);     // throws ArgumentError

// JSONL task file: one object per line with keys
// id, document, question, answers, [choices, correct_choice], task_type, metric.
std::vector<EvalTask> read_jsonl_tasks(const std::string& path);
void write_jsonl_tasks(const std::vector<EvalTask>& tasks, const std::string& path);

}  // namespace lcl
