//! JSON-lines framing and the TCP transport.
//!
//! Every message is one JSON object on its own line, tagged by `type`.
//! Unknown fields are rejected and amplitudes are re-checked for norm on
//! receipt.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};

use crate::engine::{BobState, Message, Transport};
use crate::error::{Error, Result};

fn transport_err(e: std::io::Error) -> Error {
    Error::Transport(e.to_string())
}

/// One frame, without the trailing newline.
pub fn encode_frame(msg: &Message) -> String {
    serde_json::to_string(msg).expect("messages always serialize")
}

pub fn decode_frame(line: &str) -> Result<Message> {
    let msg: Message = serde_json::from_str(line.trim_end()).map_err(|e| Error::WireFormat(e.to_string()))?;
    msg.validate()?;
    Ok(msg)
}

/// A duplex JSON-lines stream.
#[derive(Debug)]
pub struct LineChannel {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl LineChannel {
    pub fn new(stream: TcpStream) -> Result<Self> {
        let writer = stream.try_clone().map_err(transport_err)?;
        Ok(LineChannel { reader: BufReader::new(stream), writer })
    }

    pub fn send(&mut self, msg: &Message) -> Result<()> {
        let mut line = encode_frame(msg);
        line.push('\n');
        self.writer.write_all(line.as_bytes()).map_err(transport_err)?;
        self.writer.flush().map_err(transport_err)
    }

    pub fn recv(&mut self) -> Result<Message> {
        let mut line = String::new();
        let n = self.reader.read_line(&mut line).map_err(transport_err)?;
        if n == 0 {
            return Err(Error::Transport("peer closed the connection".into()));
        }
        decode_frame(&line)
    }
}

/// Alice's side of a socket session.
#[derive(Debug)]
pub struct TcpTransport {
    channel: LineChannel,
}

impl TcpTransport {
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Self> {
        let stream = TcpStream::connect(addr).map_err(transport_err)?;
        stream.set_nodelay(true).map_err(transport_err)?;
        Ok(TcpTransport { channel: LineChannel::new(stream)? })
    }
}

impl Transport for TcpTransport {
    fn send(&mut self, msg: &Message) -> Result<()> {
        self.channel.send(msg)
    }

    fn recv(&mut self) -> Result<Message> {
        self.channel.recv()
    }
}

/// Runs Bob for one session over `stream` and returns him when Alice has
/// sent `Done`.
pub fn serve_bob(stream: TcpStream, mut bob: BobState) -> Result<BobState> {
    stream.set_nodelay(true).map_err(transport_err)?;
    let mut channel = LineChannel::new(stream)?;
    while !bob.is_finished() {
        let msg = channel.recv()?;
        for reply in bob.handle(msg)? {
            channel.send(&reply)?;
        }
    }
    Ok(bob)
}
