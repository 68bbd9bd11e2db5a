#include "lamp/service.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lamp/json_io.hpp"

namespace lamp {

namespace {

std::string error_body(Errc code, const std::string& message) {
  return std::string("{\"error\":\"") + std::string(to_string(code)) + "\",\"message\":" +
         nlohmann::json(message).dump() + "}";
}

int status_for(Errc code) {
  switch (code) {
    case Errc::duplicate_policy_id:
      return 409;
    case Errc::unknown_policy_id:
      return 404;
    case Errc::io_error:
      return 500;
    default:
      return 400;
  }
}

void fail(httplib::Response& res, const LampError& e) {
  res.status = status_for(e.code());
  res.set_content(error_body(e.code(), e.what()), "application/json");
}

}  // namespace

struct Service::Impl {
  explicit Impl(Engine& engine) : engine(engine) { bind_routes(); }

  void bind_routes() {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"status\":\"ok\"}", "application/json");
    });

    server.Post("/policies", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        LampiPolicy p = policy_from_json(req.body);
        engine.add_policy(p);
        res.status = 201;
        res.set_content("{\"pid\":" + std::to_string(p.pid) + "}", "application/json");
      } catch (const LampError& e) {
        fail(res, e);
      }
    });

    server.Delete(R"(/policies/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      PolicyId pid = 0;
      const std::string& raw = req.matches[1].str();
      std::from_chars(raw.data(), raw.data() + raw.size(), pid);
      try {
        engine.remove_policy(pid);
        res.set_content("{\"removed\":" + std::to_string(pid) + "}", "application/json");
      } catch (const LampError& e) {
        fail(res, e);
      }
    });

    server.Get("/policies", [this](const httplib::Request& req, httplib::Response& res) {
      std::optional<UserId> owner;
      if (req.has_param("owner")) owner = req.get_param_value("owner");
      auto policies = engine.list_policies(owner);
      res.set_content(policies_to_json(policies), "application/json");
    });

    server.Post("/enroll", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        FaceRecord record = face_record_from_json(req.body);
        engine.enroll(record);
        res.status = 201;
        res.set_content("{\"user\":" + nlohmann::json(record.user).dump() + "}", "application/json");
      } catch (const LampError& e) {
        fail(res, e);
      }
    });

    server.Post("/check", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        PhotoManifest m = manifest_from_json(req.body);
        CheckOutcome outcome = engine.check(m);
        res.set_content(check_outcome_to_json(m.photo_id, outcome), "application/json");
      } catch (const LampError& e) {
        fail(res, e);
      }
    });

    server.Post("/enforce", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        PhotoManifest m = manifest_from_json(req.body);
        EnforcementReport report = engine.enforce(m, redactor);
        res.set_content(report_to_json(m.photo_id, report), "application/json");
      } catch (const LampError& e) {
        fail(res, e);
      }
    });
  }

  Engine& engine;
  RecordingRedactor redactor;
  httplib::Server server;
  std::thread thread;
};

Service::Service(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw LampError(Errc::io_error, "cannot bind service port");
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw LampError(Errc::io_error, "cannot bind " + host + ":" + std::to_string(port));
    }
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw LampError(Errc::io_error, "cannot serve on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace lamp
