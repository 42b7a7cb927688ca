#include "geopulse/core/sample.h"

#include <fstream>
#include <vector>

#include "geopulse/core/csv.h"
#include "geopulse/core/error.h"

namespace geopulse {

LabeledSample load_sample(std::istream& in, const std::unordered_set<std::string>& known,
                          std::string sample_id) {
  auto rows = csv::read_with_header(in, {"post_id", "relevant"}, "sample");
  LabeledSample sample;
  sample.sample_id = std::move(sample_id);
  std::vector<std::string> missing;
  for (const auto& row : rows) {
    const auto& id = row.fields[0];
    const auto& flag = row.fields[1];
    if (flag != "0" && flag != "1") {
      throw Error(ErrorCode::parse, "sample row at line " + std::to_string(row.line) +
                                        ": relevant must be 0 or 1");
    }
    if (!sample.labels.emplace(id, flag == "1").second) {
      throw Error(ErrorCode::validation, "sample row at line " + std::to_string(row.line) +
                                             ": duplicate post_id '" + id + "'");
    }
    if (!known.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::validation, "sample references unknown posts: " + list);
  }
  return sample;
}

LabeledSample load_sample(const std::filesystem::path& path,
                          const std::unordered_set<std::string>& known) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open sample " + path.string());
  return load_sample(in, known, path.stem().string());
}

void write_sample(std::ostream& out, const LabeledSample& sample) {
  csv::write_row(out, {"post_id", "relevant"});
  for (const auto& [id, relevant] : sample.labels) {
    csv::write_row(out, {id, relevant ? "1" : "0"});
  }
}

}  // namespace geopulse
