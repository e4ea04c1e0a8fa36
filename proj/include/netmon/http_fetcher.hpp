#pragma once

#include <chrono>
#include <string>

#include "netmon/linknet.hpp"

namespace netmon {

/// Live redirect oracle: HEAD first, GET when HEAD is refused or fails.
/// Only the status line and Location header are used; a GET is abandoned as
/// soon as headers arrive. Each hop has its own timeout.
class HttpRedirectOracle final : public RedirectOracle {
 public:
  explicit HttpRedirectOracle(std::chrono::milliseconds timeout = std::chrono::seconds(5),
                              std::string user_agent = "netmon-link-resolver/1.0");

  FetchAnswer fetch(const std::string& url) const override;

 private:
  std::chrono::milliseconds timeout_;
  std::string user_agent_;
};

}  // namespace netmon
