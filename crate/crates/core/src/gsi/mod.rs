pub mod envelope;
pub mod framing;
pub mod fs;
pub mod params;
pub mod schema;
pub mod server;
