#include "lff/service.hpp"

#include "lff/corpus.hpp"
#include "lff/diagnose.hpp"
#include "lff/engine.hpp"
#include "lff/serialize.hpp"
#include "lff/usage.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace lff {

namespace {

constexpr std::size_t kMaxBody = 256 * 1024;
constexpr const char *kCookie = "lff_session";

std::string envOr(const char *name, std::string fallback) {
  const char *v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string randomHex(std::size_t bytes) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  static const char *digits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes; ++i) {
    const auto b = static_cast<unsigned>(rng() & 0xff);
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

bool validToken(const std::string &s) {
  return !s.empty() && s.size() <= 64 &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c); });
}

void sendJson(httplib::Response &res, int status, const Json &body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, Json::error_handler_t::replace),
                  "application/json");
}

void sendError(httplib::Response &res, int status, const std::string &message) {
  sendJson(res, status, {{"error", message}});
}

// Waiting room in front of the solver workers: at most `slots` run at once and
// at most `slots + queue` are admitted.
class Admission {
public:
  Admission(int slots, int queue) : slots_(slots), limit_(slots + queue) {}

  bool tryEnter() {
    std::lock_guard lock(mu_);
    if (admitted_ >= limit_)
      return false;
    ++admitted_;
    return true;
  }
  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return running_ < slots_; });
    ++running_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      --running_;
      --admitted_;
    }
    cv_.notify_one();
  }

private:
  std::mutex mu_;
  std::condition_variable cv_;
  int slots_, limit_;
  int admitted_ = 0, running_ = 0;
};

struct Saved {
  std::string id, session, name;
  Json submission;
  std::string createdAt, updatedAt;
};

Json savedJson(const Saved &s, bool full) {
  Json j{{"id", s.id}, {"name", s.name}, {"createdAt", s.createdAt}, {"updatedAt", s.updatedAt}};
  if (full)
    j["submission"] = s.submission;
  return j;
}

// Submission fields must be strings when present; absent boxes are empty.
std::optional<std::string> submissionError(const Json &body) {
  if (!body.is_object())
    return "request body must be a JSON object";
  for (const char *k : {"sorts", "vocabulary", "constraints", "text"})
    if (body.contains(k) && !body[k].is_string())
      return std::string(k) + " must be a string";
  if (body.contains("options") && !body["options"].is_object() && !body["options"].is_null())
    return "options must be an object";
  return std::nullopt;
}

std::string submissionText(const Json &body) {
  if (body.contains("text"))
    return body["text"].get<std::string>();
  auto field = [&](const char *k) {
    return body.contains(k) ? body[k].get<std::string>() : std::string();
  };
  return assemble_problem_text(field("sorts"), field("vocabulary"), field("constraints"));
}

Json submissionOnly(const Json &body) {
  Json s = Json::object();
  for (const char *k : {"sorts", "vocabulary", "constraints", "text", "options"})
    if (body.contains(k))
      s[k] = body[k];
  return s;
}

} // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  c.port = std::stoi(envOr("LFF_PORT", "8080"));
  c.logPath = envOr("LFF_LOG_PATH", "usage.jsonl");
  if (auto d = envOr("LFF_DATA_DIR", ""); !d.empty())
    c.dataDir = d;
  c.maxDeadlineSecs = std::stod(envOr("LFF_MAX_DEADLINE_SECS", "30"));
  return c;
}

struct Service::Impl {
  ServiceConfig cfg;
  httplib::Server server;
  UsageLog log;
  Admission admission;
  std::vector<PuzzleRecord> puzzles;
  std::mutex savesMu;
  std::map<std::string, Saved> saves;
  std::thread thread;
  int boundPort = -1;

  explicit Impl(ServiceConfig c)
      : cfg(std::move(c)), log(cfg.logPath),
        admission(poolSize(cfg), std::max(0, cfg.queueDepth)) {
    const auto dir = cfg.corpusDir.empty() ? default_corpus_dir() : cfg.corpusDir;
    if (std::filesystem::is_directory(dir))
      puzzles = load_corpus(dir);
    loadSaves();
    routes();
  }

  static int poolSize(const ServiceConfig &c) {
    if (c.poolSize > 0)
      return c.poolSize;
    return std::max(1u, std::thread::hardware_concurrency());
  }

  // ---- sessions -----------------------------------------------------------

  std::string session(const httplib::Request &req, httplib::Response &res) {
    const auto cookies = req.get_header_value("Cookie");
    const std::string key = std::string(kCookie) + "=";
    for (std::size_t pos = 0; pos < cookies.size();) {
      auto end = cookies.find(';', pos);
      if (end == std::string::npos)
        end = cookies.size();
      auto item = cookies.substr(pos, end - pos);
      item.erase(0, item.find_first_not_of(' '));
      if (item.rfind(key, 0) == 0 && validToken(item.substr(key.size())))
        return item.substr(key.size());
      pos = end + 1;
    }
    auto id = randomHex(16);
    res.set_header("Set-Cookie", std::string(kCookie) + "=" + id +
                                     "; Path=/; HttpOnly; SameSite=Lax");
    return id;
  }

  // ---- request bodies and options ----------------------------------------

  std::optional<Json> body(const httplib::Request &req, httplib::Response &res) {
    if (req.body.size() > kMaxBody) {
      sendError(res, 413, "request body exceeds 256 KiB");
      return std::nullopt;
    }
    try {
      return Json::parse(req.body);
    } catch (const Json::parse_error &e) {
      sendError(res, 400, std::string("malformed JSON: ") + e.what());
      return std::nullopt;
    }
  }

  SolveOptions options(const Json &body) const {
    SolveOptions base;
    base.deadlineSecs = std::min(cfg.defaultDeadlineSecs, cfg.maxDeadlineSecs);
    auto o = options_from_json(body.value("options", Json()), base);
    o.deadlineSecs = std::min(o.deadlineSecs, cfg.maxDeadlineSecs);
    return o;
  }

  void record(const std::string &sessionId, const char *action, const std::string &text,
              const std::string &kind, std::chrono::steady_clock::time_point start) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    log.append({utc_timestamp_now(), sessionId, action, text, kind, ms});
  }

  // check, solve and diagnose share the parsing, admission and logging.
  template <class Fn>
  void runHandler(const httplib::Request &req, httplib::Response &res, const char *action,
                  bool gated, Fn fn) {
    const auto start = std::chrono::steady_clock::now();
    const auto sid = session(req, res);
    auto j = body(req, res);
    if (!j)
      return;
    if (auto err = submissionError(*j)) {
      sendError(res, 400, *err);
      return;
    }
    SolveOptions opts;
    try {
      opts = options(*j);
    } catch (const std::invalid_argument &e) {
      sendError(res, 400, e.what());
      return;
    }
    const std::string text = submissionText(*j);
    if (gated && !admission.tryEnter()) {
      res.set_header("Retry-After", "1");
      sendError(res, 503, "solver busy, retry shortly");
      return;
    }
    Json payload;
    std::string kind;
    if (gated) {
      admission.acquire();
      try {
        std::tie(payload, kind) = fn(*j, text, opts);
      } catch (...) {
        admission.release();
        throw;
      }
      admission.release();
    } else {
      std::tie(payload, kind) = fn(*j, text, opts);
    }
    record(sid, action, text, kind, start);
    sendJson(res, 200, payload);
  }

  // ---- saves ---------------------------------------------------------------

  void loadSaves() {
    if (!cfg.dataDir)
      return;
    const auto file = *cfg.dataDir / "saves.json";
    if (!std::filesystem::exists(file))
      return;
    std::ifstream in(file, std::ios::binary);
    const Json all = Json::parse(in);
    for (const auto &s : all)
      saves[s.at("id")] = {s.at("id"),         s.at("session"), s.at("name"),
                           s.at("submission"), s.at("createdAt"), s.at("updatedAt")};
  }

  void persist() {
    if (!cfg.dataDir)
      return;
    std::filesystem::create_directories(*cfg.dataDir);
    Json all = Json::array();
    for (const auto &[id, s] : saves)
      all.push_back({{"id", s.id},
                     {"session", s.session},
                     {"name", s.name},
                     {"submission", s.submission},
                     {"createdAt", s.createdAt},
                     {"updatedAt", s.updatedAt}});
    const auto file = *cfg.dataDir / "saves.json";
    const auto tmp = *cfg.dataDir / "saves.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << all.dump(-1, ' ', false, Json::error_handler_t::replace);
    }
    std::filesystem::rename(tmp, file);
  }

  bool nameTaken(const std::string &sid, const std::string &name, const std::string &except) {
    return std::any_of(saves.begin(), saves.end(), [&](const auto &kv) {
      return kv.second.session == sid && kv.second.name == name && kv.first != except;
    });
  }

  // A fresh updatedAt strictly later than `prev`, so that optimistic
  // concurrency checks never see two revisions with the same stamp.
  static std::string stampAfter(const std::string &prev) {
    auto now = utc_timestamp_now();
    if (prev.empty() || now > prev)
      return now;
    const long long ms = parse_utc_timestamp(prev) + 1;
    const std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[40], out[48];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
    return out;
  }

  std::optional<std::string> saveFieldsError(const Json &j, bool requireName) {
    if (auto err = submissionError(j))
      return err;
    if (requireName && !j.contains("name"))
      return "name is required";
    if (j.contains("name") && (!j["name"].is_string() || j["name"].get<std::string>().empty()))
      return "name must be a non-empty string";
    if (j.contains("updatedAt") && !j["updatedAt"].is_string())
      return "updatedAt must be a string";
    return std::nullopt;
  }

  // ---- routes --------------------------------------------------------------

  void routes() {
    server.set_payload_max_length(kMaxBody);
    server.new_task_queue = [this] {
      const auto n = static_cast<std::size_t>(poolSize(cfg) + std::max(0, cfg.queueDepth) + 8);
      return new httplib::ThreadPool(n);
    };
    server.set_error_handler([](const httplib::Request &, httplib::Response &res) {
      if (res.body.empty())
        sendError(res, res.status, res.status == 413 ? "request body exceeds 256 KiB"
                                                     : httplib::status_message(res.status));
    });
    server.set_exception_handler(
        [](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
          std::string what = "unknown error";
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception &e) {
            what = e.what();
          } catch (...) {
          }
          sendError(res, 500, what);
        });

    server.Get("/api/health", [](const httplib::Request &, httplib::Response &res) {
      sendJson(res, 200, {{"status", "ok"}});
    });

    server.Post("/api/check", [this](const httplib::Request &req, httplib::Response &res) {
      runHandler(req, res, "check", false, [](const Json &, const std::string &text, SolveOptions o) {
        o.mode = Mode::Check;
        auto out = lff::run(text, o);
        return std::pair{to_json(out), std::string(outcome_kind_name(out.kind))};
      });
    });

    server.Post("/api/solve", [this](const httplib::Request &req, httplib::Response &res) {
      runHandler(req, res, "solve", true, [](const Json &, const std::string &text, SolveOptions o) {
        o.mode = Mode::Solve;
        auto out = lff::run(text, o);
        return std::pair{to_json(out), std::string(outcome_kind_name(out.kind))};
      });
    });

    server.Post("/api/diagnose", [this](const httplib::Request &req, httplib::Response &res) {
      if (auto j = Json::parse(req.body, nullptr, false); !j.is_discarded() && j.is_object()) {
        const auto kind = j.value("kind", Json("mus"));
        if (!kind.is_string() ||
            (kind != "mus" && kind != "approx" && kind != "clauses")) {
          sendError(res, 400, "kind must be one of mus, approx, clauses");
          return;
        }
      }
      runHandler(req, res, "diagnose", true,
                 [](const Json &j, const std::string &text, const SolveOptions &o) {
                   const auto k = j.value("kind", std::string("mus"));
                   const auto mode = k == "approx"    ? DiagnoseMode::Approx
                                     : k == "clauses" ? DiagnoseMode::Clauses
                                                      : DiagnoseMode::Mus;
                   auto out = diagnose(text, mode, o);
                   Json payload = to_json(out);
                   return std::pair{payload, payload["kind"].get<std::string>()};
                 });
    });

    server.Get("/api/puzzles", [this](const httplib::Request &req, httplib::Response &res) {
      std::optional<Level> level;
      if (req.has_param("level")) {
        level = parse_level(req.get_param_value("level"));
        if (!level) {
          sendError(res, 400, "unknown level " + req.get_param_value("level"));
          return;
        }
      }
      Json out = Json::array();
      for (const auto &p : list_puzzles(puzzles, level))
        out.push_back(puzzle_summary(p));
      sendJson(res, 200, out);
    });

    server.Get(R"(/api/puzzles/([A-Za-z0-9_-]+))",
               [this](const httplib::Request &req, httplib::Response &res) {
                 for (const auto &p : puzzles)
                   if (p.id == req.matches[1].str()) {
                     sendJson(res, 200, to_json(p));
                     return;
                   }
                 sendError(res, 404, "no such puzzle");
               });

    server.Post("/api/saves", [this](const httplib::Request &req, httplib::Response &res) {
      const auto sid = session(req, res);
      auto j = body(req, res);
      if (!j)
        return;
      if (auto err = saveFieldsError(*j, true)) {
        sendError(res, 400, *err);
        return;
      }
      std::lock_guard lock(savesMu);
      const auto name = (*j)["name"].get<std::string>();
      if (nameTaken(sid, name, "")) {
        sendError(res, 409, "a save with this name already exists");
        return;
      }
      Saved s;
      do
        s.id = randomHex(12);
      while (saves.count(s.id));
      s.session = sid;
      s.name = name;
      s.submission = submissionOnly(*j);
      s.createdAt = s.updatedAt = utc_timestamp_now();
      saves[s.id] = s;
      persist();
      sendJson(res, 201, savedJson(s, true));
    });

    server.Get("/api/saves", [this](const httplib::Request &req, httplib::Response &res) {
      const auto sid = session(req, res);
      std::lock_guard lock(savesMu);
      std::vector<const Saved *> mine;
      for (const auto &[id, s] : saves)
        if (s.session == sid)
          mine.push_back(&s);
      std::sort(mine.begin(), mine.end(),
                [](const Saved *a, const Saved *b) { return a->name < b->name; });
      Json out = Json::array();
      for (const auto *s : mine)
        out.push_back(savedJson(*s, false));
      sendJson(res, 200, out);
    });

    const std::string savePath = R"(/api/saves/([A-Za-z0-9]+))";

    server.Get(savePath, [this](const httplib::Request &req, httplib::Response &res) {
      const auto sid = session(req, res);
      std::lock_guard lock(savesMu);
      auto it = saves.find(req.matches[1].str());
      if (it == saves.end() || it->second.session != sid) {
        sendError(res, 404, "no such save");
        return;
      }
      sendJson(res, 200, savedJson(it->second, true));
    });

    server.Put(savePath, [this](const httplib::Request &req, httplib::Response &res) {
      const auto sid = session(req, res);
      auto j = body(req, res);
      if (!j)
        return;
      if (auto err = saveFieldsError(*j, false)) {
        sendError(res, 400, *err);
        return;
      }
      std::lock_guard lock(savesMu);
      auto it = saves.find(req.matches[1].str());
      if (it == saves.end() || it->second.session != sid) {
        sendError(res, 404, "no such save");
        return;
      }
      Saved &s = it->second;
      if (j->contains("updatedAt") && (*j)["updatedAt"].get<std::string>() != s.updatedAt) {
        sendJson(res, 409, {{"error", "save was modified since it was loaded"},
                            {"current", savedJson(s, false)}});
        return;
      }
      const auto name = j->value("name", s.name);
      if (nameTaken(sid, name, s.id)) {
        sendError(res, 409, "a save with this name already exists");
        return;
      }
      s.name = name;
      s.submission = submissionOnly(*j);
      s.updatedAt = stampAfter(s.updatedAt);
      persist();
      sendJson(res, 200, savedJson(s, true));
    });

    server.Delete(savePath, [this](const httplib::Request &req, httplib::Response &res) {
      const auto sid = session(req, res);
      std::lock_guard lock(savesMu);
      auto it = saves.find(req.matches[1].str());
      if (it == saves.end() || it->second.session != sid) {
        sendError(res, 404, "no such save");
        return;
      }
      saves.erase(it);
      persist();
      res.status = 204;
    });
  }

  void bind() {
    if (cfg.port == 0)
      boundPort = server.bind_to_any_port(cfg.host);
    else
      boundPort = server.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
    if (boundPort < 0)
      throw std::runtime_error("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  }
};

Service::Service(ServiceConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

Service::~Service() { stop(); }

int Service::start() {
  impl_->bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->boundPort;
}

void Service::run() {
  impl_->bind();
  impl_->server.listen_after_bind();
}

void Service::stop() {
  if (!impl_)
    return;
  impl_->server.stop();
  if (impl_->thread.joinable())
    impl_->thread.join();
}

int Service::port() const { return impl_->boundPort; }

const ServiceConfig &Service::config() const { return impl_->cfg; }

} // namespace lff
