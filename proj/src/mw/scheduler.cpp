#include "blendsim/mw/scheduler.hpp"

#include <stdexcept>
#include <utility>

namespace blendsim::mw {

void Context::send(int to, Msg msg, double delay) {
  if (delay < 0.0) throw std::invalid_argument("message delay must be >= 0");
  rt_.post(to, std::move(msg), now_ + delay);
}

int Runtime::add_actor(Actor* a) {
  actors_.push_back(a);
  int id = static_cast<int>(actors_.size()) - 1;
  on_actor_added(id);
  return id;
}

void Runtime::post(int to, Msg msg, double at) {
  if (to < 0 || to >= static_cast<int>(actors_.size())) {
    throw std::out_of_range("message addressed to an unknown actor");
  }
  // Deliveries scheduled "now" by the actor being serviced still go behind
  // everything already queued at the same instant (seq breaks the tie).
  if (at < now_) at = now_;
  queue_.push(Envelope{at, next_seq_++, to, std::move(msg)});
}

void Runtime::run(const std::function<bool()>& until) {
  while (!queue_.empty()) {
    Envelope e = queue_.top();
    queue_.pop();
    now_ = e.at;
    Context ctx(*this, now_, e.to);
    dispatch(*actors_[e.to], e.msg, ctx);
    ++delivered_;
    if (until && until()) return;
  }
}

ThreadedScheduler::~ThreadedScheduler() {
  for (auto& w : workers_) {
    {
      std::lock_guard<std::mutex> lk(w->m);
      w->quit = true;
    }
    w->cv.notify_all();
    if (w->thread.joinable()) w->thread.join();
  }
}

void ThreadedScheduler::on_actor_added(int id) {
  auto w = std::make_unique<Worker>();
  Worker* wp = w.get();
  Actor* actor = actors_[id];
  wp->thread = std::thread([wp, actor] {
    std::unique_lock<std::mutex> lk(wp->m);
    for (;;) {
      wp->cv.wait(lk, [wp] { return wp->msg != nullptr || wp->quit; });
      if (wp->quit) return;
      actor->handle(*wp->msg, *wp->ctx);
      wp->msg = nullptr;
      wp->ctx = nullptr;
      wp->done = true;
      wp->cv.notify_all();
    }
  });
  workers_.push_back(std::move(w));
}

void ThreadedScheduler::dispatch(Actor&, const Msg& msg, Context& ctx) {
  Worker* w = workers_[static_cast<std::size_t>(ctx.self())].get();
  std::unique_lock<std::mutex> lk(w->m);
  w->msg = &msg;
  w->ctx = &ctx;
  w->done = false;
  w->cv.notify_all();
  w->cv.wait(lk, [w] { return w->done; });
}

}  // namespace blendsim::mw
