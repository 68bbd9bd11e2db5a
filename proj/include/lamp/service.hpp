#pragma once

#include <memory>
#include <string>

#include "lamp/engine.hpp"

namespace lamp {

// JSON-over-HTTP front end for the engine:
//   POST   /policies        insert a policy          201 | 400 | 409
//   DELETE /policies/{pid}  remove a policy          200 | 404
//   GET    /policies?owner= list policies            200
//   POST   /enroll          enroll a face record     201 | 400
//   POST   /check           manifest -> decisions    200 | 400
//   POST   /enforce         manifest -> report       200 | 400
//   GET    /healthz         liveness                 200
// Error bodies: {"error": <code name>, "message": ...}.
class Service {
 public:
  explicit Service(Engine& engine);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop() is called elsewhere.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lamp
