#include "streamsched/episode.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "streamsched/error.hpp"

namespace streamsched {
namespace {

constexpr const char* kHeader = "epoch,reward,epsilon,moved_threads,avg_time_seconds";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double workload_scale_at(const std::vector<WorkloadStep>& steps, int epoch) {
  double scale = 1.0;
  int latest = -1;
  for (const auto& s : steps) {
    if (s.epoch <= epoch && s.epoch >= latest) {
      scale = s.scale;
      latest = s.epoch;
    }
  }
  return scale;
}

void write_episode_csv(const EpisodeLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << kHeader << '\n';
  for (const auto& r : log) {
    out << r.epoch << ',' << format_double(r.reward) << ',' << format_double(r.epsilon) << ','
        << r.moved_threads << ',' << format_double(r.avg_time_seconds) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

EpisodeLog read_episode_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": unexpected episode CSV header");
  }
  EpisodeLog log;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    EpisodeRecord r;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    row >> r.epoch >> c1 >> r.reward >> c2 >> r.epsilon >> c3 >> r.moved_threads >> c4 >>
        r.avg_time_seconds;
    if (!row || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      throw Error(ErrorCode::kInvalidConfig,
                  path.string() + ": malformed row at line " + std::to_string(line_no));
    }
    log.push_back(r);
  }
  return log;
}

}  // namespace streamsched
