//! The session server, its TCP front end, and a client usable over TCP or
//! in-process. The in-process transport still goes through the canonical
//! text encoding so both paths exercise the same wire format.

use std::io;
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;

use thiserror::Error;

use super::envelope::{request_envelope, request_of, response_envelope, response_of, Envelope, Op, Status};
use super::framing::{read_frame, write_frame, FrameError, DEFAULT_MAX_FRAME};
use super::fs::FeatureStructure as Fs;
use super::params::SessionParams;
use crate::coconuts::{Kernel, Request, Response};

pub struct Server {
    kernel: Arc<Kernel>,
}

impl Server {
    pub fn new(kernel: Arc<Kernel>) -> Server {
        Server { kernel }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Every request envelope yields exactly one response with the same
    /// session id (the fresh id for open-session).
    pub fn handle(&self, env: &Envelope) -> Envelope {
        let s = env.session.as_str();
        match env.op {
            Op::OpenSession => match SessionParams::from_fs(&env.payload) {
                Err(e) => Envelope::error(s, env.op, "bad-params", e.to_string()),
                Ok(params) => match self.kernel.open_session(params) {
                    Ok(id) => Envelope::response(id, env.op, Status::Ok, Fs::empty_map()),
                    Err(e) => Envelope::error(s, env.op, e.code(), e.to_string()),
                },
            },
            Op::CloseSession => match self.kernel.close_session(s) {
                Ok(()) => Envelope::response(s, env.op, Status::Ok, Fs::empty_map()),
                Err(e) => Envelope::error(s, env.op, e.code(), e.to_string()),
            },
            _ => match request_of(env) {
                Ok(req) => response_envelope(s, env.op, &self.kernel.dispatch(s, req)),
                Err(e) => Envelope::error(s, env.op, "bad-payload", e.to_string()),
            },
        }
    }

    /// Text in, text out; undecodable input gets an error envelope.
    pub fn handle_text(&self, text: &str) -> String {
        match Envelope::decode(text) {
            Ok(env) => self.handle(&env).encode(),
            Err(e) => Envelope::error(session_hint(text), Op::Analyze, "syntax-error", e).encode(),
        }
    }

    fn handle_bytes(&self, bytes: &[u8]) -> String {
        match std::str::from_utf8(bytes) {
            Ok(t) => self.handle_text(t),
            Err(e) => Envelope::error("", Op::Analyze, "syntax-error", e.to_string()).encode(),
        }
    }

    /// Serves one connection until the peer closes it.
    pub fn serve_connection(&self, mut stream: TcpStream) -> Result<(), FrameError> {
        while let Some(frame) = read_frame(&mut stream, DEFAULT_MAX_FRAME)? {
            let reply = self.handle_bytes(&frame);
            write_frame(&mut stream, reply.as_bytes())?;
        }
        Ok(())
    }

    /// Accept loop: one thread per connection.
    pub fn serve(self: Arc<Self>, listener: TcpListener) -> io::Result<()> {
        for stream in listener.incoming() {
            let stream = stream?;
            let server = Arc::clone(&self);
            thread::spawn(move || {
                if let Err(e) = server.serve_connection(stream) {
                    eprintln!("connection closed: {e}");
                }
            });
        }
        Ok(())
    }
}

/// Best-effort recovery of the session id from a malformed request.
fn session_hint(text: &str) -> String {
    text.split("SESSION:")
        .nth(1)
        .and_then(|r| r.trim_start().strip_prefix('"'))
        .and_then(|r| r.split('"').next())
        .unwrap_or("")
        .to_string()
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("server closed the connection")]
    Closed,
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("server error {code}: {detail}")]
    Server { code: String, detail: String },
}

/// Carries one encoded request to the server and returns the encoded reply.
pub trait Transport {
    fn round_trip(&mut self, request: &str) -> Result<String, ClientError>;
}

pub struct InProcess {
    server: Arc<Server>,
}

impl InProcess {
    pub fn new(server: Arc<Server>) -> InProcess {
        InProcess { server }
    }
}

impl Transport for InProcess {
    fn round_trip(&mut self, request: &str) -> Result<String, ClientError> {
        Ok(self.server.handle_text(request))
    }
}

pub struct Tcp {
    stream: TcpStream,
}

impl Tcp {
    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<Tcp> {
        Ok(Tcp { stream: TcpStream::connect(addr)? })
    }
}

impl Transport for Tcp {
    fn round_trip(&mut self, request: &str) -> Result<String, ClientError> {
        write_frame(&mut self.stream, request.as_bytes()).map_err(FrameError::from)?;
        let reply = read_frame(&mut self.stream, DEFAULT_MAX_FRAME)?.ok_or(ClientError::Closed)?;
        String::from_utf8(reply).map_err(|e| ClientError::Malformed(e.to_string()))
    }
}

pub struct Client<T: Transport> {
    transport: T,
}

impl<T: Transport> Client<T> {
    pub fn new(transport: T) -> Client<T> {
        Client { transport }
    }

    fn exchange(&mut self, env: &Envelope) -> Result<Envelope, ClientError> {
        let reply = self.transport.round_trip(&env.encode())?;
        let back = Envelope::decode(&reply).map_err(ClientError::Malformed)?;
        if back.session != env.session && env.op != Op::OpenSession {
            return Err(ClientError::Malformed(format!("session mismatch: {} vs {}", back.session, env.session)));
        }
        Ok(back)
    }

    fn expect_ok(back: Envelope) -> Result<Envelope, ClientError> {
        match back.status {
            Some(Status::Error { code, detail }) => Err(ClientError::Server { code, detail }),
            Some(_) => Ok(back),
            None => Err(ClientError::Malformed("response without status".into())),
        }
    }

    pub fn open_session(&mut self, params: &SessionParams) -> Result<String, ClientError> {
        let env = Envelope::request("", Op::OpenSession, params.to_fs());
        Ok(Self::expect_ok(self.exchange(&env)?)?.session)
    }

    pub fn close_session(&mut self, session: &str) -> Result<(), ClientError> {
        let env = Envelope::request(session, Op::CloseSession, Fs::empty_map());
        Self::expect_ok(self.exchange(&env)?).map(|_| ())
    }

    /// Server-side errors come back as `Response::Error`.
    pub fn request(&mut self, session: &str, request: &Request) -> Result<Response, ClientError> {
        let back = self.exchange(&request_envelope(session, request))?;
        response_of(&back).map_err(|e| ClientError::Malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coconuts::KernelConfig;

    fn server() -> Arc<Server> {
        Arc::new(Server::new(Arc::new(Kernel::new(KernelConfig::default()))))
    }

    #[test]
    fn malformed_text_gets_error_envelope() {
        let s = server();
        let r = Envelope::decode(&s.handle_text("[COOP")).unwrap();
        assert!(matches!(r.status, Some(Status::Error { ref code, .. }) if code == "syntax-error"));
        let r = Envelope::decode(&s.handle_text("[OP: analyze SESSION: \"s9\" PAYLOAD: [TEXT: 5]]")).unwrap();
        assert_eq!(r.session, "s9");
        assert!(matches!(r.status, Some(Status::Error { .. })));
    }

    #[test]
    fn bad_params_on_open() {
        let mut c = Client::new(InProcess::new(server()));
        let p = SessionParams { workday_start: 900, workday_end: 800, ..SessionParams::default() };
        assert!(matches!(c.open_session(&p), Err(ClientError::Server { .. })));
    }

    #[test]
    fn fresh_ids_are_distinct() {
        let mut c = Client::new(InProcess::new(server()));
        let a = c.open_session(&SessionParams::default()).unwrap();
        let b = c.open_session(&SessionParams::default()).unwrap();
        assert_ne!(a, b);
        c.close_session(&a).unwrap();
        assert!(c.close_session(&a).is_err());
    }
}
