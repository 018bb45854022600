//! Exact-arithmetic certification of an explicit family of polynomial disks
//! whose images stay inside a chain of blow-up chart neighbourhoods while
//! their centres escape along the chain.

pub mod arith;
pub mod atlas;
pub mod certificate;
pub mod disktrace;
pub mod circle;
pub mod family;
pub mod interval;
pub mod lemmas;
pub mod pipeline;
pub mod poly;
pub mod roots;
pub mod sampling;
