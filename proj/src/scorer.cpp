#include "promo/scorer.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "promo/corpus.hpp"

namespace promo {

namespace {

class BaselineValenceScorer final : public Scorer {
 public:
  BaselineValenceScorer(RatingLexicon ratings, BaselineScorerConfig config)
      : ratings_(std::move(ratings)), config_(config) {
    if (ratings_.ratings.empty())
      throw std::invalid_argument("baseline scorer: rating lexicon is empty");
    if (config_.valence_scale <= 0.0)
      throw std::invalid_argument("baseline scorer: scale must be positive");
  }

  std::vector<SentimentScore> score(const std::vector<std::string>& sentences) override {
    std::vector<SentimentScore> out;
    out.reserve(sentences.size());
    for (const std::string& s : sentences) out.push_back(score_one(s));
    return out;
  }

  std::string describe() const override { return "baseline_valence"; }

 private:
  SentimentScore score_one(const std::string& sentence) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const Token& t : tokenize(sentence)) {
      const Rating* r = ratings_.find(t.lower);
      if (r) {
        sum += r->valence;
        ++n;
      }
    }
    if (n == 0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    const double mean = sum / static_cast<double>(n);
    const double pos =
        1.0 / (1.0 + std::exp(-(mean - config_.valence_midpoint) / config_.valence_scale));
    const double rest = 1.0 - pos;
    return {pos, 0.5 * rest, 0.5 * rest};
  }

  RatingLexicon ratings_;
  BaselineScorerConfig config_;
};

using nlohmann::json;

// Bidirectional pipe to a child process with a poll-based line reader.
class ChildProcess {
 public:
  ChildProcess(const std::string& command, double timeout_seconds)
      : timeout_ms_(static_cast<int>(timeout_seconds * 1000.0)) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw std::runtime_error("scorer: pipe() failed");
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("scorer: fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = from_child[0];
    out_fd_ = to_child[1];
  }

  ~ChildProcess() {
    if (out_fd_ >= 0) close(out_fd_);
    if (in_fd_ >= 0) close(in_fd_);
    if (pid_ > 0) {
      int status = 0;
      if (waitpid(pid_, &status, WNOHANG) == 0) {
        kill(pid_, SIGTERM);
        waitpid(pid_, &status, 0);
      }
    }
  }

  void write_line(const std::string& line) {
    std::string buf = line + "\n";
    std::size_t off = 0;
    while (off < buf.size()) {
      ssize_t n = ::write(out_fd_, buf.data() + off, buf.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("scorer: write to child failed (" +
                                 std::string(std::strerror(errno)) + ")");
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    while (true) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      struct pollfd pfd{in_fd_, POLLIN, 0};
      int rc = poll(&pfd, 1, timeout_ms_);
      if (rc == 0) throw std::runtime_error("scorer: timeout waiting for response");
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("scorer: poll failed");
      }
      char chunk[4096];
      ssize_t n = ::read(in_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("scorer: read from child failed");
      }
      if (n == 0) throw std::runtime_error("scorer: child closed its output (EOF)");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

class ExternalScorer final : public Scorer {
 public:
  ExternalScorer(const std::string& command, double timeout_seconds)
      : command_(command), child_(command, timeout_seconds) {
    child_.write_line(R"({"hello": 1})");
    json reply;
    try {
      reply = json::parse(child_.read_line());
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("scorer handshake: invalid JSON: ") + e.what());
    }
    if (!reply.contains("hello") || reply["hello"] != 1)
      throw std::runtime_error("scorer handshake: missing {\"hello\": 1} echo");
    batch_ = reply.contains("batch") ? reply["batch"].get<std::size_t>() : 1;
    if (batch_ < 1) batch_ = 1;
    probe_determinism();
  }

  std::vector<SentimentScore> score(const std::vector<std::string>& sentences) override {
    std::vector<SentimentScore> out(sentences.size());
    std::size_t next = 0;
    while (next < sentences.size()) {
      const std::size_t count = std::min(batch_, sentences.size() - next);
      for (std::size_t i = 0; i < count; ++i) {
        json req = {{"id", std::to_string(next + i)}, {"text", sentences[next + i]}};
        child_.write_line(req.dump());
      }
      std::size_t received = 0;
      while (received < count) {
        SentimentScore s;
        std::string id = read_response(s);
        std::size_t idx = 0;
        try {
          idx = std::stoul(id);
        } catch (const std::exception&) {
          throw std::runtime_error("scorer: response with unknown id \"" + id + "\"");
        }
        if (idx < next || idx >= next + count)
          throw std::runtime_error("scorer: response id \"" + id +
                                   "\" outside the in-flight batch");
        out[idx] = s;
        ++received;
      }
      next += count;
    }
    return out;
  }

  std::string describe() const override { return "external:" + command_; }

 private:
  std::string read_response(SentimentScore& s) {
    json resp;
    try {
      resp = json::parse(child_.read_line());
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("scorer: invalid response JSON: ") + e.what());
    }
    if (!resp.contains("id"))
      throw std::runtime_error("scorer: response missing id");
    s.positive = resp.at("positive").get<double>();
    s.neutral = resp.at("neutral").get<double>();
    s.negative = resp.at("negative").get<double>();
    const double sum = s.positive + s.neutral + s.negative;
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::runtime_error("scorer: probabilities for sentence id " +
                               resp["id"].get<std::string>() + " sum to " +
                               std::to_string(sum) + ", expected 1");
    return resp["id"].get<std::string>();
  }

  void probe_determinism() {
    const std::vector<std::string> probe = {"The study was performed twice."};
    auto a = score(probe);
    auto b = score(probe);
    if (a[0].positive != b[0].positive || a[0].neutral != b[0].neutral ||
        a[0].negative != b[0].negative)
      throw std::runtime_error(
          "scorer rejected at handshake: repeated scoring of the same sentence "
          "returned different results (determinism contract)");
  }

  std::string command_;
  ChildProcess child_;
  std::size_t batch_ = 1;
};

}  // namespace

std::unique_ptr<Scorer> make_baseline_valence_scorer(RatingLexicon ratings,
                                                     BaselineScorerConfig config) {
  return std::make_unique<BaselineValenceScorer>(std::move(ratings), config);
}

std::unique_ptr<Scorer> make_external_scorer(const std::string& command,
                                             double timeout_seconds) {
  return std::make_unique<ExternalScorer>(command, timeout_seconds);
}

}  // namespace promo
