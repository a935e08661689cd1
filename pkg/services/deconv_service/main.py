"""Main FastAPI application for the deconvolution service."""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from core.errors import DeconvError
from services.deconv_service.routes import router

app = FastAPI(
    title="Noisy Blind Deconvolution API",
    description="Simulation and estimation of the noisy blind deconvolution model.",
    version="0.1.0",
)

app.include_router(router)


@app.exception_handler(DeconvError)
async def deconv_error_handler(request: Request, exc: DeconvError) -> JSONResponse:
    """Map pipeline errors to 422 responses carrying the error code."""
    return JSONResponse(status_code=422, content={"detail": exc.message, "code": exc.code.value})


@app.get("/health")
async def health_check() -> dict[str, str]:
    """Health check endpoint."""
    return {"status": "healthy"}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000)
