use std::net::TcpListener;
use std::sync::Arc;

use termin_core::coconuts::{Kernel, KernelConfig, Request, Response};
use termin_core::gsi::envelope::{Envelope, Op, Status};
use termin_core::gsi::framing::{read_frame, write_frame};
use termin_core::gsi::params::SessionParams;
use termin_core::gsi::server::{Client, InProcess, Server, Tcp};
use termin_core::semantics::Coop;
use termin_core::time::Moment;

fn server() -> Arc<Server> {
    Arc::new(Server::new(Arc::new(Kernel::new(KernelConfig::default()))))
}

fn spawn() -> std::net::SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let srv = server();
    std::thread::spawn(move || srv.serve(listener));
    addr
}

fn at(s: &str) -> Option<Moment> {
    Some(s.parse().unwrap())
}

#[test]
fn analyze_and_next_solution_over_tcp() {
    let mut c = Client::new(Tcp::connect(spawn()).unwrap());
    let s = c.open_session(&SessionParams::default()).unwrap();
    let r = c
        .request(&s, &Request::Analyze { text: "Ich meinte natürlich Montag den 4. 11.".into(), time: at("1996-10-28T11:00") })
        .unwrap();
    let Response::Solution(il) = r else { panic!("{r:?}") };
    assert_eq!(il.coop, Coop::Propose);
    // a fresh dialogue has a single reading
    assert_eq!(c.request(&s, &Request::NextSolution).unwrap(), Response::Exhausted);
    c.close_session(&s).unwrap();
    let r = c.request(&s, &Request::NextSolution).unwrap();
    assert!(matches!(r, Response::Error { ref code, .. } if code == "unknown-session"), "{r:?}");
}

#[test]
fn raw_frames_get_one_reply_each() {
    let mut stream = std::net::TcpStream::connect(spawn()).unwrap();
    write_frame(&mut stream, b"[OP: open-session PAYLOAD: [] SESSION: \"\"]").unwrap();
    let reply = Envelope::decode(std::str::from_utf8(&read_frame(&mut stream, 1 << 20).unwrap().unwrap()).unwrap()).unwrap();
    assert_eq!(reply.op, Op::OpenSession);
    assert_eq!(reply.status, Some(Status::Ok));
    assert!(!reply.session.is_empty());

    write_frame(&mut stream, b"not a feature structure").unwrap();
    let reply = Envelope::decode(std::str::from_utf8(&read_frame(&mut stream, 1 << 20).unwrap().unwrap()).unwrap()).unwrap();
    assert!(matches!(reply.status, Some(Status::Error { ref code, .. }) if code == "syntax-error"));

    write_frame(&mut stream, &[0xff, 0xfe, 0x00]).unwrap();
    let reply = read_frame(&mut stream, 1 << 20).unwrap().unwrap();
    assert!(String::from_utf8_lossy(&reply).contains("syntax-error"));
}

#[test]
fn sessions_do_not_share_context() {
    let srv = server();
    let mut c = Client::new(InProcess::new(srv.clone()));
    let s1 = c.open_session(&SessionParams::default()).unwrap();
    let s2 = c.open_session(&SessionParams::default()).unwrap();
    assert_ne!(s1, s2);
    let text = "Ich meinte natürlich Montag den 4. 11.";
    let first = c.request(&s1, &Request::Analyze { text: text.into(), time: at("1996-10-28T11:00") }).unwrap();
    let Response::Solution(il) = first.clone() else { panic!("{first:?}") };
    c.request(&s1, &Request::Commit { il, time: at("1996-10-28T11:00") }).unwrap();
    // the second session still sees a fresh dialogue
    let second = c.request(&s2, &Request::Analyze { text: text.into(), time: at("1996-10-28T11:00") }).unwrap();
    assert_eq!(first, second);
    assert_eq!(srv.kernel().live_sessions(), 2);
}

#[test]
fn bad_params_are_reported() {
    let srv = server();
    let reply = srv.handle_text("[OP: open-session PAYLOAD: [WORKDAY-START: \"25:00\"] SESSION: \"\"]");
    assert!(reply.contains("bad-params"), "{reply}");
}
