#pragma once

#include <httplib.h>

#include "dt/service.hpp"

namespace dt {

/// Routes every request to the service.
inline void bind(httplib::Server& server, TutorService& service) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/.*)", forward);
  server.Post(R"(/.*)", forward);
}

}  // namespace dt
