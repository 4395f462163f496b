#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace depthkit {

enum class Direction { kLowerBetter, kHigherBetter };

struct MetricColumn {
  std::string name;
  Direction direction;
};

/// One proxy task's method x metric matrix. Rows keep file order.
struct ResultTable {
  std::string task;
  std::vector<MetricColumn> columns;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  std::string baseline;
  /// Present in rows but never ranked.
  std::set<std::string> excluded;

  const std::vector<double>* find(std::string_view method) const;
  void validate() const;
};

enum class TableFormat { kCsv, kJson };

/// CSV header: "method,<metric>:<up|down>,...". Lines starting with '#' are
/// comments; "# task: <name>" names the task (default: the file stem) and
/// "# exclude: a,b" marks rows as ranking-exempt.
/// An empty `baseline` uses the JSON "baseline" field.
ResultTable load_table(const std::filesystem::path& path, TableFormat format,
                       const std::string& baseline = {});
ResultTable load_table(const std::filesystem::path& path, const std::string& baseline = {});

ResultTable parse_table_csv(const std::string& text, std::string task,
                            const std::string& baseline);
ResultTable parse_table_json(const std::string& text, const std::string& baseline = {});
std::string table_to_json(const ResultTable& table);

/// Mean over columns of the signed per-cell improvement against the
/// baseline row, in percent.
double improvement_ratio(const ResultTable& table, std::string_view method);

/// Competition ranking (1, 1, 3) by improvement ratio, descending, over every
/// row that is neither the baseline nor excluded.
std::map<std::string, int> task_rank(const ResultTable& table);

struct TaskEntry {
  double imp_percent = 0.0;
  /// Empty for excluded rows.
  std::optional<int> rank;
};

struct TaskResult {
  std::string task;
  std::map<std::string, TaskEntry> methods;
};

struct RankReport {
  std::vector<TaskResult> per_task;
  std::map<std::string, double> average_rank;
  std::map<std::string, int> tasks_counted;
};

RankReport average_rank(const std::vector<ResultTable>& tables);

enum class ReportFormat { kJson, kMarkdown };

/// Reals are printed with two decimals. Markdown rows are sorted by average
/// rank, ascending.
std::string emit_report(const RankReport& report, ReportFormat format);
RankReport parse_report_json(const std::string& text);

}  // namespace depthkit
