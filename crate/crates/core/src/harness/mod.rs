pub mod gen;
pub mod io;
pub mod laws;
pub mod oracle;
