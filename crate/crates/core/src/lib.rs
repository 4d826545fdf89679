pub mod ast;
pub mod builtins;
pub mod corpus;
pub mod equiv;
pub mod frontend;
pub mod gen;
pub mod machine;
pub mod matching;
pub mod props;
pub mod subst;
