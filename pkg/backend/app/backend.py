# backend.py
import asyncio, json, uvicorn, logging
from datetime import datetime
from typing import AsyncGenerator
from fastapi import FastAPI
from fastapi.responses import StreamingResponse
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
from dotenv import load_dotenv
from app.workbench import dump_source, evaluate_source, trace_source
from semantics.games import render_trace
from setup.init import API_HOST, API_PORT, DEFAULT_SEED, MAX_STEPS, get_config
from utils.errors import Diverged, WorkbenchError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

# ===========================================================================================================================================================
# FastAPI Backend Server
# ===========================================================================================================================================================

# initialise fastapi
app = FastAPI(title="DPCF Workbench API", version="0.1.0")

# Add CORS middleware so browser tools can call the API
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # In production, specify exact origins
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

class SourceRequest(BaseModel):
    """A PCF program with its step budget and opponent seed"""
    source: str
    max_steps: int = Field(default=MAX_STEPS, gt=0)
    seed: int = DEFAULT_SEED

@app.get('/')
def index():
    return {"status": "online", "message": "Welcome to the DPCF Workbench API"}

@app.get('/health')
def health_check():
    """Health check endpoint for monitoring"""
    return {"status": "healthy", "timestamp": datetime.now().isoformat()}

@app.get("/api/v1/config")
def get_configuration():
    """Effective budgets and verification bounds."""
    return {**get_config(), "status": "success"}

@app.post("/api/v1/eval")
async def eval_program(request: SourceRequest):
    """Runs the compiled machine against the numeral or boolean reader."""
    try:
        result = await asyncio.to_thread(evaluate_source, request.source, request.max_steps)
        return {"status": "success", "type": str(result.type), "value": result.value, "text": result.text}
    except Diverged:
        return {"status": "error", "message": "DIVERGED"}
    except WorkbenchError as e:
        logger.error(f"Error evaluating program: {e}")
        return {"status": "error", "message": str(e)}

@app.post("/api/v1/trace")
async def trace_program(request: SourceRequest):
    try:
        report = await asyncio.to_thread(trace_source, request.source, request.max_steps, request.seed)
        return {
            "status": "success",
            "trace": render_trace(report.external),
            "snapshots": [{"tape": tape, "stack": stack} for tape, stack in report.snapshots],
            "truncated": report.truncated,
        }
    except WorkbenchError as e:
        logger.error(f"Error tracing program: {e}")
        return {"status": "error", "message": str(e)}

@app.post("/api/v1/dump")
async def dump_program(request: SourceRequest):
    try:
        listing = await asyncio.to_thread(dump_source, request.source)
        return {"status": "success", "dump": listing}
    except WorkbenchError as e:
        logger.error(f"Error dumping program: {e}")
        return {"status": "error", "message": str(e)}

@app.post("/api/v1/stream-trace")
async def stream_trace(request: SourceRequest) -> StreamingResponse:
    """Streams one SSE event per P-move snapshot, then the external trace."""
    async def stream_generator() -> AsyncGenerator[str, None]:
        logger.info(f"Streaming trace of '{request.source[:50]}' with budget {request.max_steps}")
        try:
            report = await asyncio.to_thread(trace_source, request.source, request.max_steps, request.seed)
        except WorkbenchError as e:
            logger.error(f"Error during streaming: {e}")
            yield f"data: {json.dumps({'error': str(e)})}\n\n"
            return
        for k, (tape, stack) in enumerate(report.snapshots, start=1):
            yield f"data: {json.dumps({'p_move': k, 'tape': tape, 'stack': stack})}\n\n"
        yield f"data: {json.dumps({'trace': render_trace(report.external), 'truncated': report.truncated})}\n\n"

    return StreamingResponse(
        stream_generator(),
        media_type="text/event-stream",
        headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
    )

# uvicorn app.backend:app --reload
if __name__ == "__main__":
    uvicorn.run(app, host=API_HOST, port=API_PORT, log_level="info")
