pub mod cobordism;
pub mod curve;
pub mod geom;
pub mod io;
pub mod registry;
pub mod moduli;
pub mod surface;
